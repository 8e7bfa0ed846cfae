//! Surfaces in `F_*^n` with normalized surface measure, the extension and
//! restriction operators, Gauss sums, the Bochner-Riesz kernel and the
//! algebraic facts about paraboloids and cones that the restriction bounds rest on.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::{FieldElement, FieldSpec};
use crate::grid::{weighted_lp, Grid, Side};
use crate::polynomial::Polynomial;

/// Default cap on enumeration work (tuples visited).
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    /// `{(xi, xi.xi)}`; in dimension 2 this is the parabola.
    Paraboloid,
    /// `{(xi, u, v) : uv = xi^2}` minus the origin, in `F^3`.
    Cone,
    /// `{(t, t^2, ..., t^n)}`.
    MomentCurve,
    /// `{(eta, eta.eta, theta, eta.theta)}` in `F^{2n}`.
    DoubleParaboloid,
    Custom,
}

impl SurfaceKind {
    fn code(self) -> u32 {
        match self {
            SurfaceKind::Paraboloid => 0,
            SurfaceKind::Cone => 1,
            SurfaceKind::MomentCurve => 2,
            SurfaceKind::DoubleParaboloid => 3,
            SurfaceKind::Custom => 4,
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::Paraboloid => "paraboloid",
            SurfaceKind::Cone => "cone",
            SurfaceKind::MomentCurve => "moment-curve",
            SurfaceKind::DoubleParaboloid => "double-paraboloid",
            SurfaceKind::Custom => "custom",
        })
    }
}

struct SurfaceInner {
    field: FieldSpec,
    n: usize,
    kind: SurfaceKind,
    coords: Vec<FieldElement>,
    index: Vec<usize>,
    position: HashMap<usize, usize>,
    includes_origin: bool,
}

/// A finite point set `S` in `F_*^n` carrying the measure `|S|^-1` per point.
#[derive(Clone)]
pub struct SurfaceMeasure(Arc<SurfaceInner>);

impl fmt::Debug for SurfaceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceMeasure")
            .field("kind", &self.0.kind)
            .field("field", &self.0.field.order())
            .field("n", &self.0.n)
            .field("points", &self.len())
            .finish()
    }
}

impl SurfaceMeasure {
    fn from_points(
        field: &FieldSpec,
        n: usize,
        kind: SurfaceKind,
        points: Vec<Vec<FieldElement>>,
        includes_origin: bool,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("surface has no points".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * n);
        let mut index = Vec::with_capacity(points.len());
        let mut position = HashMap::with_capacity(points.len());
        for pt in &points {
            let i = field.point_index(pt);
            if position.insert(i, index.len()).is_some() {
                return Err(Error::InvalidInput(
                    "surface points must be distinct".into(),
                ));
            }
            index.push(i);
            coords.extend_from_slice(pt);
        }
        Ok(SurfaceMeasure(Arc::new(SurfaceInner {
            field: field.clone(),
            n,
            kind,
            coords,
            index,
            position,
            includes_origin,
        })))
    }

    pub fn paraboloid(field: &FieldSpec, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(format!(
                "paraboloid needs n >= 2, got {n}"
            )));
        }
        let base = field.space_size(n - 1);
        let points = (0..base)
            .map(|i| {
                let mut xi = field.point_coords(i, n - 1);
                let tau = field.dot(&xi, &xi);
                xi.push(tau);
                xi
            })
            .collect();
        Self::from_points(field, n, SurfaceKind::Paraboloid, points, false)
    }

    pub fn cone(field: &FieldSpec) -> Result<Self> {
        Self::cone_with_origin(field, false)
    }

    /// The cone `uv = xi^2` in `F^3`; the origin is dropped unless requested.
    pub fn cone_with_origin(field: &FieldSpec, include_origin: bool) -> Result<Self> {
        let mut points = Vec::new();
        for i in 0..field.space_size(3) {
            let c = field.point_coords(i, 3);
            if !include_origin && i == 0 {
                continue;
            }
            if field.mul(c[1], c[2]) == field.mul(c[0], c[0]) {
                points.push(c);
            }
        }
        Self::from_points(field, 3, SurfaceKind::Cone, points, include_origin)
    }

    pub fn moment_curve(field: &FieldSpec, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(format!(
                "moment curve needs n >= 2, got {n}"
            )));
        }
        if (field.characteristic() as usize) <= n {
            return Err(Error::CharacteristicTooSmall {
                characteristic: field.characteristic(),
                n,
            });
        }
        let points = field
            .elements()
            .map(|t| (1..=n).map(|j| field.pow(t, j as u64)).collect())
            .collect();
        Self::from_points(field, n, SurfaceKind::MomentCurve, points, false)
    }

    /// `{(eta, eta.eta, theta, eta.theta) : eta, theta in F^{base_n - 1}}` in
    /// ambient dimension `2 base_n`. Points are ordered with `eta` outer and
    /// `theta` inner, so each cap `{eta = alpha}` is a contiguous block.
    pub fn double_paraboloid(field: &FieldSpec, base_n: usize) -> Result<Self> {
        if base_n < 2 {
            return Err(Error::UnsupportedDimension(format!(
                "double paraboloid needs base dimension >= 2, got {base_n}"
            )));
        }
        let m = field.space_size(base_n - 1);
        let mut points = Vec::with_capacity(m * m);
        for ei in 0..m {
            let eta = field.point_coords(ei, base_n - 1);
            let ee = field.dot(&eta, &eta);
            for ti in 0..m {
                let theta = field.point_coords(ti, base_n - 1);
                let mut pt = eta.clone();
                pt.push(ee);
                pt.extend_from_slice(&theta);
                pt.push(field.dot(&eta, &theta));
                points.push(pt);
            }
        }
        Self::from_points(
            field,
            2 * base_n,
            SurfaceKind::DoubleParaboloid,
            points,
            false,
        )
    }

    /// Common zero set of the given polynomials.
    pub fn custom(field: &FieldSpec, n: usize, polys: &[Polynomial]) -> Result<Self> {
        if polys.iter().any(|p| p.nvars() != n) {
            return Err(Error::ShapeMismatch(
                "polynomial arity differs from n".into(),
            ));
        }
        let points = (0..field.space_size(n))
            .map(|i| field.point_coords(i, n))
            .filter(|c| polys.iter().all(|p| p.eval(field, c).is_zero()))
            .collect();
        Self::from_points(field, n, SurfaceKind::Custom, points, false)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.0.field
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn kind(&self) -> SurfaceKind {
        self.0.kind
    }

    pub fn len(&self) -> usize {
        self.0.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.index.is_empty()
    }

    pub fn includes_origin(&self) -> bool {
        self.0.includes_origin
    }

    pub fn point(&self, i: usize) -> &[FieldElement] {
        &self.0.coords[i * self.0.n..(i + 1) * self.0.n]
    }

    pub fn points(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.0.coords.chunks_exact(self.0.n)
    }

    /// Grid index of every point, aligned with the point list.
    pub fn grid_indices(&self) -> &[usize] {
        &self.0.index
    }

    pub fn position(&self, point: &[FieldElement]) -> Option<usize> {
        self.0
            .position
            .get(&self.0.field.point_index(point))
            .copied()
    }

    pub fn contains(&self, point: &[FieldElement]) -> bool {
        self.position(point).is_some()
    }

    /// Short identifier used in reports and cache keys.
    pub fn label(&self) -> String {
        let origin = if self.0.kind == SurfaceKind::Cone && self.0.includes_origin {
            "+origin"
        } else {
            ""
        };
        format!(
            "{}{}:F{}:n{}",
            self.0.kind,
            origin,
            self.0.field.order(),
            self.0.n
        )
    }

    /// One point per line, coordinates as space-separated base-10 field indices.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for pt in self.points() {
            let line: Vec<String> = pt.iter().map(|c| c.0.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub(crate) fn kind_code(&self) -> u32 {
        self.0.kind.code()
    }
}

/// Enough information to rebuild a non-custom surface over a known field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceId {
    pub kind: SurfaceKind,
    /// Ambient dimension.
    pub n: usize,
    #[serde(default)]
    pub include_origin: bool,
}

impl SurfaceId {
    pub fn build(&self, field: &FieldSpec) -> Result<SurfaceMeasure> {
        match self.kind {
            SurfaceKind::Cone => SurfaceMeasure::cone_with_origin(field, self.include_origin),
            SurfaceKind::DoubleParaboloid => SurfaceMeasure::double_paraboloid(field, self.n / 2),
            SurfaceKind::Custom => Err(Error::InvalidInput(
                "custom surfaces cannot be rebuilt from an id".into(),
            )),
            kind => build_surface(kind, field, self.n, None),
        }
    }
}

impl SurfaceMeasure {
    pub fn id(&self) -> SurfaceId {
        SurfaceId {
            kind: self.kind(),
            n: self.n(),
            include_origin: self.includes_origin(),
        }
    }
}

/// Builds a surface by kind; `custom` supplies the polynomials for [`SurfaceKind::Custom`].
pub fn build_surface(
    kind: SurfaceKind,
    field: &FieldSpec,
    n: usize,
    custom: Option<&[Polynomial]>,
) -> Result<SurfaceMeasure> {
    match kind {
        SurfaceKind::Paraboloid => SurfaceMeasure::paraboloid(field, n),
        SurfaceKind::Cone => {
            if n != 3 {
                return Err(Error::UnsupportedDimension(format!(
                    "cone lives in F^3, got n = {n}"
                )));
            }
            SurfaceMeasure::cone(field)
        }
        SurfaceKind::MomentCurve => SurfaceMeasure::moment_curve(field, n),
        SurfaceKind::DoubleParaboloid => SurfaceMeasure::double_paraboloid(field, n),
        SurfaceKind::Custom => {
            let polys = custom
                .ok_or_else(|| Error::InvalidInput("custom surface needs polynomials".into()))?;
            SurfaceMeasure::custom(field, n, polys)
        }
    }
}

/// A function on the points of a surface.
#[derive(Clone, Debug)]
pub struct SurfaceFunction {
    pub surface: SurfaceMeasure,
    pub values: Vec<Complex64>,
}

impl SurfaceFunction {
    pub fn new(surface: &SurfaceMeasure, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != surface.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a surface of {} points",
                values.len(),
                surface.len()
            )));
        }
        Ok(SurfaceFunction {
            surface: surface.clone(),
            values,
        })
    }

    pub fn constant(surface: &SurfaceMeasure, c: Complex64) -> Self {
        SurfaceFunction {
            surface: surface.clone(),
            values: vec![c; surface.len()],
        }
    }

    pub fn from_fn(surface: &SurfaceMeasure, f: impl Fn(&[FieldElement]) -> Complex64) -> Self {
        SurfaceFunction {
            surface: surface.clone(),
            values: surface.points().map(f).collect(),
        }
    }

    /// Indicator of the `i`-th point.
    pub fn delta(surface: &SurfaceMeasure, i: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); surface.len()];
        values[i] = Complex64::new(1.0, 0.0);
        SurfaceFunction {
            surface: surface.clone(),
            values,
        }
    }

    /// Norm in `L^p(S, d sigma)`.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        self.lp_norm_f64(p.to_f64())
    }

    pub fn lp_norm_f64(&self, p: f64) -> f64 {
        weighted_lp(&self.values, 1.0 / self.values.len() as f64, p)
    }

    /// Header (`p`, `k`, ambient `n`, surface kind code, point count as
    /// little-endian `u32`s) followed by little-endian `f64` pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let f = self.surface.field();
        let mut out = Vec::with_capacity(20 + 16 * self.values.len());
        for h in [
            f.characteristic(),
            f.degree(),
            self.surface.n() as u32,
            self.surface.kind_code(),
            self.values.len() as u32,
        ] {
            out.extend_from_slice(&h.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    /// Decodes values written by [`SurfaceFunction::to_bytes`] onto `surface`.
    pub fn from_bytes(surface: &SurfaceMeasure, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 20 {
            return Err(Error::Decode("surface function header truncated".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let f = surface.field();
        if word(0) != f.characteristic()
            || word(1) != f.degree()
            || word(2) as usize != surface.n()
            || word(3) != surface.kind_code()
            || word(4) as usize != surface.len()
        {
            return Err(Error::Decode("header does not match the surface".into()));
        }
        let values = crate::grid::decode_complex(&bytes[20..])?;
        Self::new(surface, values)
    }
}

/// `(g d sigma)^v(x) = |S|^-1 sum_{xi in S} g(xi) e(x . xi)`, through the inverse transform.
pub fn extension(g: &SurfaceFunction) -> Result<Grid> {
    let s = &g.surface;
    let field = s.field();
    let mut freq = Grid::zeros(field, s.n(), Side::Frequency);
    let scale = field.space_size(s.n()) as f64 / s.len() as f64;
    let vals = freq.values_mut();
    for (&i, &v) in s.grid_indices().iter().zip(&g.values) {
        vals[i] += v * scale;
    }
    freq.fourier_inverse()
}

/// Same operator as [`extension`], by direct summation over `x` and `S`.
/// Shares no code with the transform path.
pub fn extension_direct(g: &SurfaceFunction) -> Grid {
    let s = &g.surface;
    let field = s.field();
    let n = s.n();
    let inv = 1.0 / s.len() as f64;
    let values: Vec<Complex64> = collect_indexed(field.space_size(n), |xi| {
        let x = field.point_coords(xi, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (pt, &v) in s.points().zip(&g.values) {
            acc += v * field.e(field.dot(&x, pt));
        }
        acc * inv
    });
    Grid::from_values(field, n, Side::Space, values).expect("length matches")
}

#[cfg(feature = "parallel")]
pub(crate) fn collect_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn collect_indexed<T>(len: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Samples a frequency-side grid at the surface points.
pub fn restriction(f_hat: &Grid, surface: &SurfaceMeasure) -> Result<SurfaceFunction> {
    if f_hat.side() != Side::Frequency {
        return Err(Error::WrongSide {
            expected: Side::Frequency,
            found: f_hat.side(),
        });
    }
    if f_hat.n() != surface.n() || f_hat.field() != surface.field() {
        return Err(Error::ShapeMismatch(
            "grid and surface dimensions differ".into(),
        ));
    }
    let values = surface
        .grid_indices()
        .iter()
        .map(|&i| f_hat.values()[i])
        .collect();
    SurfaceFunction::new(surface, values)
}

/// `S(x) = sum_xi e(x xi^2)`.
pub fn gauss_sum(field: &FieldSpec, x: FieldElement) -> Complex64 {
    field
        .elements()
        .map(|xi| field.e(field.mul(x, field.mul(xi, xi))))
        .sum()
}

/// `K = (d sigma)^v - delta_0`.
pub fn bochner_riesz_kernel(surface: &SurfaceMeasure) -> Result<Grid> {
    let mut k = extension(&SurfaceFunction::constant(
        surface,
        Complex64::new(1.0, 0.0),
    ))?;
    k.values_mut()[0] -= Complex64::new(1.0, 0.0);
    Ok(k)
}

/// `-2 log(max |K|) / log |F|`.
pub fn fourier_dimension(surface: &SurfaceMeasure) -> Result<f64> {
    let q = surface.field().order();
    if q < 3 {
        return Err(Error::InvalidInput("field too small".into()));
    }
    let kmax = bochner_riesz_kernel(surface)?.max_abs();
    if kmax < 1e-12 {
        return Err(Error::DegenerateKernel);
    }
    Ok(-2.0 * kmax.ln() / (q as f64).ln())
}

/// Number of ordered `k`-tuples of surface points summing to each `eta`,
/// as a dense table over `F^n`.
pub fn surface_sum_table(surface: &SurfaceMeasure, k: usize, budget: u128) -> Result<Vec<u64>> {
    if !(2..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("k must be 2 or 3, got {k}")));
    }
    let needed = (surface.len() as u128).pow(k as u32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let field = surface.field().clone();
    let n = surface.n();
    let size = field.space_size(n);
    let pts: Vec<&[FieldElement]> = surface.points().collect();

    let row = |i: usize| -> Vec<u64> {
        let mut table = vec![0u64; size];
        let a = pts[i];
        for b in &pts {
            let ab = field.add_vec(a, b);
            if k == 2 {
                table[field.point_index(&ab)] += 1;
            } else {
                for c in &pts {
                    table[field.point_index(&field.add_vec(&ab, c))] += 1;
                }
            }
        }
        table
    };
    let merge = |mut x: Vec<u64>, y: Vec<u64>| {
        for (a, b) in x.iter_mut().zip(y) {
            *a += b;
        }
        x
    };

    #[cfg(feature = "parallel")]
    let table = {
        use rayon::prelude::*;
        (0..pts.len())
            .into_par_iter()
            .map(row)
            .reduce(|| vec![0u64; size], merge)
    };
    #[cfg(not(feature = "parallel"))]
    let table = (0..pts.len()).map(row).fold(vec![0u64; size], merge);
    Ok(table)
}

/// Number of ordered solutions of `eta = xi_1 + ... + xi_k` with `xi_i in S`.
pub fn surface_sum_count(
    surface: &SurfaceMeasure,
    k: usize,
    eta: &[FieldElement],
    budget: u128,
) -> Result<u64> {
    let table = surface_sum_table(surface, k, budget)?;
    Ok(table[surface.field().point_index(eta)])
}

/// Maximum of the solution count over `eta`; with `exclude_origin` the
/// maximum is taken over `eta != 0`.
pub fn surface_sum_max(
    surface: &SurfaceMeasure,
    k: usize,
    exclude_origin: bool,
    budget: u128,
) -> Result<u64> {
    let table = surface_sum_table(surface, k, budget)?;
    let skip = usize::from(exclude_origin);
    Ok(table.iter().skip(skip).copied().max().unwrap_or(0))
}

/// `g_a(xi, tau) = (xi + a, tau + 2 xi.a + a.a)`.
pub fn galilean_point(
    field: &FieldSpec,
    point: &[FieldElement],
    a: &[FieldElement],
) -> Vec<FieldElement> {
    let m = point.len() - 1;
    let xi = &point[..m];
    let tau = point[m];
    let two = field.from_int(2);
    let shift = field.add(field.mul(two, field.dot(xi, a)), field.dot(a, a));
    let mut out = field.add_vec(xi, a);
    out.push(field.add(tau, shift));
    out
}

/// Position of the image of every paraboloid point under `g_a`.
pub fn galilean_permutation(surface: &SurfaceMeasure, a: &[FieldElement]) -> Result<Vec<usize>> {
    if surface.kind() != SurfaceKind::Paraboloid {
        return Err(Error::WrongSurfaceKind);
    }
    if a.len() + 1 != surface.n() {
        return Err(Error::ShapeMismatch("shift must live in F^{n-1}".into()));
    }
    surface
        .points()
        .map(|pt| {
            surface
                .position(&galilean_point(surface.field(), pt, a))
                .ok_or_else(|| Error::InvalidInput("image left the paraboloid".into()))
        })
        .collect()
}

/// Push-forward `h(g_a(omega)) = g(omega)`.
pub fn galilean_transform(g: &SurfaceFunction, a: &[FieldElement]) -> Result<SurfaceFunction> {
    let perm = galilean_permutation(&g.surface, a)?;
    let mut values = vec![Complex64::new(0.0, 0.0); g.values.len()];
    for (i, &j) in perm.iter().enumerate() {
        values[j] = g.values[i];
    }
    SurfaceFunction::new(&g.surface, values)
}

/// `X = {(x, y, z) : z a non-zero square, y = x^2 / 4z}` in `F^3`.
pub fn cone_counterexample_set(field: &FieldSpec) -> Vec<[FieldElement; 3]> {
    let four = field.from_int(4);
    let mut out = Vec::new();
    for z in field.nonzero_squares() {
        let denom = field.inv(field.mul(four, z)).expect("z is non-zero");
        for x in field.elements() {
            let y = field.mul(field.mul(x, x), denom);
            out.push([x, y, z]);
        }
    }
    out
}

/// Largest deviation of `|chi_X^|` from `|Q| |F|^{1/2}` over cone points with `u != 0`,
/// computed through the forward transform.
pub fn cone_counterexample_check(field: &FieldSpec) -> Result<f64> {
    let mut chi = Grid::zeros(field, 3, Side::Space);
    for pt in cone_counterexample_set(field) {
        chi.set(&pt, Complex64::new(1.0, 0.0));
    }
    let hat = chi.fourier_forward()?;
    let cone = SurfaceMeasure::cone(field)?;
    let q = field.order() as f64;
    let expected = (q - 1.0) / 2.0 * q.sqrt();
    let mut dev: f64 = 0.0;
    for pt in cone.points().filter(|pt| !pt[1].is_zero()) {
        dev = dev.max((hat.at(pt).norm() - expected).abs());
    }
    Ok(dev)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelFormulaCheck {
    /// Max deviation over `x_n != 0` from `|F|^{1-n} S(x_n)^{n-1} e(-x.x / 4x_n)`.
    pub generic: f64,
    /// Max deviation over `x_n = 0` from `delta_0(x)`.
    pub flat_slice: f64,
}

impl KernelFormulaCheck {
    pub fn max(&self) -> f64 {
        self.generic.max(self.flat_slice)
    }
}

/// Compares the transform-computed `(d sigma)^v` of the paraboloid with its
/// Gauss-sum closed form. Completing the square gives the phase
/// `e(-x.x / 4 x_n)` (note the minus sign).
pub fn paraboloid_kernel_formula_check(field: &FieldSpec, n: usize) -> Result<KernelFormulaCheck> {
    let s = SurfaceMeasure::paraboloid(field, n)?;
    let dsv = extension(&SurfaceFunction::constant(&s, Complex64::new(1.0, 0.0)))?;
    let q = field.order() as f64;
    let four = field.from_int(4);
    let gauss: Vec<Complex64> = field.elements().map(|x| gauss_sum(field, x)).collect();
    let mut check = KernelFormulaCheck {
        generic: 0.0,
        flat_slice: 0.0,
    };
    for (i, &v) in dsv.values().iter().enumerate() {
        let x = field.point_coords(i, n);
        let (under, xn) = (&x[..n - 1], x[n - 1]);
        if xn.is_zero() {
            let want = if under.iter().all(|c| c.is_zero()) {
                1.0
            } else {
                0.0
            };
            check.flat_slice = check.flat_slice.max((v - want).norm());
        } else {
            let phase = field.neg(field.div(field.dot(under, under), field.mul(four, xn))?);
            let want = gauss[xn.index()].powu(n as u32 - 1) * field.e(phase) * q.powi(1 - n as i32);
            check.generic = check.generic.max((v - want).norm());
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn surface_sizes() {
        assert_eq!(SurfaceMeasure::paraboloid(&f(5), 2).unwrap().len(), 5);
        assert_eq!(SurfaceMeasure::paraboloid(&f(7), 3).unwrap().len(), 49);
        assert_eq!(SurfaceMeasure::cone(&f(7)).unwrap().len(), 48);
        assert_eq!(
            SurfaceMeasure::cone_with_origin(&f(7), true).unwrap().len(),
            49
        );
        assert_eq!(SurfaceMeasure::moment_curve(&f(7), 3).unwrap().len(), 7);
        assert_eq!(
            SurfaceMeasure::double_paraboloid(&f(5), 2).unwrap().len(),
            25
        );
        assert_eq!(
            SurfaceMeasure::moment_curve(&f(3), 3).unwrap_err(),
            Error::CharacteristicTooSmall {
                characteristic: 3,
                n: 3
            }
        );
        assert!(matches!(
            build_surface(SurfaceKind::Cone, &f(5), 2, None),
            Err(Error::UnsupportedDimension(_))
        ));
        assert!(matches!(
            SurfaceMeasure::paraboloid(&f(5), 1),
            Err(Error::UnsupportedDimension(_))
        ));
    }

    #[test]
    fn custom_surface_matches_paraboloid() {
        let fld = f(5);
        let x = Polynomial::var(&fld, 2, 0);
        let t = Polynomial::var(&fld, 2, 1);
        let parab = t.sub(&x.mul(&x, &fld), &fld);
        let s = SurfaceMeasure::custom(&fld, 2, &[parab]).unwrap();
        let p = SurfaceMeasure::paraboloid(&fld, 2).unwrap();
        assert_eq!(s.len(), 5);
        for pt in p.points() {
            assert!(s.contains(pt));
        }
    }

    #[test]
    fn extension_of_delta_has_flat_modulus() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        let e = extension(&SurfaceFunction::delta(&s, 3)).unwrap();
        for v in e.values() {
            assert!((v.norm() - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_mass_normalization() {
        for s in [
            SurfaceMeasure::paraboloid(&f(5), 3).unwrap(),
            SurfaceMeasure::cone(&f(5)).unwrap(),
            SurfaceMeasure::moment_curve(&f(5), 3).unwrap(),
        ] {
            let e = extension(&SurfaceFunction::constant(&s, Complex64::new(1.0, 0.0))).unwrap();
            assert!((e.values()[0] - 1.0).norm() < 1e-12);
            assert!(bochner_riesz_kernel(&s).unwrap().values()[0].norm() < 1e-12);
        }
    }

    #[test]
    fn restriction_reads_transform() {
        let fld = f(5);
        let s = SurfaceMeasure::paraboloid(&fld, 2).unwrap();
        let d = Grid::delta(&fld, 2, Side::Space, &[FieldElement::ZERO; 2]);
        let r = restriction(&d.fourier_forward().unwrap(), &s).unwrap();
        assert!(r.values.iter().all(|v| (v - 1.0).norm() < 1e-12));
        let x0 = [FieldElement(2), FieldElement(4)];
        let mut g = Grid::zeros(&fld, 2, Side::Space);
        g.set(&x0, Complex64::new(0.0, 3.0));
        let r = restriction(&g.fourier_forward().unwrap(), &s).unwrap();
        assert!(r.values.iter().all(|v| (v.norm() - 3.0).abs() < 1e-12));
        assert!(matches!(restriction(&g, &s), Err(Error::WrongSide { .. })));
    }

    #[test]
    fn gauss_sums_small() {
        let f3 = f(3);
        assert!((gauss_sum(&f3, FieldElement(1)).norm_sqr() - 3.0).abs() < 1e-12);
        assert!((gauss_sum(&f3, FieldElement(0)) - 3.0).norm() < 1e-12);
        let f7 = f(7);
        for x in 1..7 {
            assert!((gauss_sum(&f7, FieldElement(x)).norm_sqr() - 7.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kernel_sup_and_dimension() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        let k = bochner_riesz_kernel(&s).unwrap();
        assert!((k.max_abs() - 5f64.powf(-0.5)).abs() < 1e-12);
        assert!((fourier_dimension(&s).unwrap() - 1.0).abs() < 1e-9);
        let s3 = SurfaceMeasure::paraboloid(&f(7), 3).unwrap();
        assert!((fourier_dimension(&s3).unwrap() - 2.0).abs() < 1e-9);
        // x_3 = 0, x != 0: kernel vanishes.
        let k3 = bochner_riesz_kernel(&s3).unwrap();
        let fld = s3.field();
        for a in 0..7 {
            for b in 0..7 {
                if a + b > 0 {
                    assert!(
                        k3.at(&[FieldElement(a), FieldElement(b), FieldElement::ZERO])
                            .norm()
                            < 1e-12
                    );
                }
            }
        }
        let _ = fld;
    }

    #[test]
    fn additive_energy_maxima() {
        let parab = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        assert_eq!(
            surface_sum_max(&parab, 2, false, DEFAULT_BUDGET).unwrap(),
            2
        );
        let p3 = SurfaceMeasure::paraboloid(&f(7), 3).unwrap();
        // |F| + 1 when -1 is not a square; the admissible bound 2|F|^{n-2} = 14 is not sharp.
        assert_eq!(surface_sum_max(&p3, 2, false, DEFAULT_BUDGET).unwrap(), 8);
        let mc = SurfaceMeasure::moment_curve(&f(7), 3).unwrap();
        assert_eq!(surface_sum_max(&mc, 3, false, DEFAULT_BUDGET).unwrap(), 6);
        let total: u64 = surface_sum_table(&p3, 2, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .sum();
        assert_eq!(total, 49 * 49);
        assert!(matches!(
            surface_sum_max(&p3, 3, false, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn galilean_examples() {
        let fld = f(5);
        let s = SurfaceMeasure::paraboloid(&fld, 2).unwrap();
        let id = galilean_permutation(&s, &[FieldElement::ZERO]).unwrap();
        assert_eq!(id, (0..5).collect::<Vec<_>>());
        let img = galilean_point(
            &fld,
            &[FieldElement(0), FieldElement(0)],
            &[FieldElement(1)],
        );
        assert_eq!(img, vec![FieldElement(1), FieldElement(1)]);
        let cone = SurfaceMeasure::cone(&fld).unwrap();
        assert_eq!(
            galilean_permutation(&cone, &[FieldElement(1), FieldElement(0)]),
            Err(Error::WrongSurfaceKind)
        );
    }

    #[test]
    fn cone_counterexample_sizes() {
        assert_eq!(cone_counterexample_set(&f(7)).len(), 21);
        assert!(cone_counterexample_check(&f(7)).unwrap() < 1e-9);
        assert!(cone_counterexample_check(&f(11)).unwrap() < 1e-9);
    }

    #[test]
    fn kernel_closed_form() {
        let c = paraboloid_kernel_formula_check(&f(5), 2).unwrap();
        assert!(c.max() < 1e-10, "{c:?}");
        let c = paraboloid_kernel_formula_check(&f(7), 3).unwrap();
        assert!(c.max() < 1e-10, "{c:?}");
        assert_eq!(c.flat_slice, c.flat_slice.min(1e-12));
    }
}

//! Dense complex functions on `F^n` (counting measure `dx`) and on the dual
//! space `F_*^n` (normalized counting measure `d xi`), with the Fourier
//! transform pair between them.
//!
//! Points are stored in little-endian mixed radix: coordinate 1 varies fastest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `F^n` with counting measure.
    Space,
    /// `F_*^n` with mass `|F|^-n` per point.
    Frequency,
}

impl Side {
    fn code(self) -> u32 {
        match self {
            Side::Space => 0,
            Side::Frequency => 1,
        }
    }

    fn from_code(c: u32) -> Result<Self> {
        match c {
            0 => Ok(Side::Space),
            1 => Ok(Side::Frequency),
            _ => Err(Error::Decode(format!("unknown side code {c}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Grid {
    field: FieldSpec,
    n: usize,
    side: Side,
    values: Vec<Complex64>,
}

#[cfg(feature = "parallel")]
macro_rules! for_each_out {
    ($out:expr, $body:expr) => {{
        use rayon::prelude::*;
        $out.par_iter_mut().enumerate().for_each($body)
    }};
}

#[cfg(not(feature = "parallel"))]
macro_rules! for_each_out {
    ($out:expr, $body:expr) => {
        $out.iter_mut().enumerate().for_each($body)
    };
}

impl Grid {
    pub fn zeros(field: &FieldSpec, n: usize, side: Side) -> Self {
        let len = field.space_size(n);
        Grid {
            field: field.clone(),
            n,
            side,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn constant(field: &FieldSpec, n: usize, side: Side, c: Complex64) -> Self {
        let mut g = Self::zeros(field, n, side);
        g.values.fill(c);
        g
    }

    pub fn from_values(
        field: &FieldSpec,
        n: usize,
        side: Side,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let len = field.space_size(n);
        if values.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "expected {len} values for |F|^n, got {}",
                values.len()
            )));
        }
        Ok(Grid {
            field: field.clone(),
            n,
            side,
            values,
        })
    }

    pub fn from_fn(
        field: &FieldSpec,
        n: usize,
        side: Side,
        mut f: impl FnMut(&[FieldElement]) -> Complex64,
    ) -> Self {
        let len = field.space_size(n);
        let values = (0..len).map(|i| f(&field.point_coords(i, n))).collect();
        Grid {
            field: field.clone(),
            n,
            side,
            values,
        }
    }

    /// Kronecker delta at `point`.
    pub fn delta(field: &FieldSpec, n: usize, side: Side, point: &[FieldElement]) -> Self {
        let mut g = Self::zeros(field, n, side);
        g.values[field.point_index(point)] = Complex64::new(1.0, 0.0);
        g
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, point: &[FieldElement]) -> Complex64 {
        self.values[self.field.point_index(point)]
    }

    pub fn set(&mut self, point: &[FieldElement], v: Complex64) {
        let i = self.field.point_index(point);
        self.values[i] = v;
    }

    /// Weight of one point in the attached measure.
    pub fn weight(&self) -> f64 {
        match self.side {
            Side::Space => 1.0,
            Side::Frequency => 1.0 / self.values.len() as f64,
        }
    }

    fn check_same_shape(&self, other: &Grid) -> Result<()> {
        if self.field != other.field || self.n != other.n {
            return Err(Error::ShapeMismatch(
                "grids over different fields or dimensions".into(),
            ));
        }
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        Ok(())
    }

    /// One axis pass of the dense character contraction. `sign` is the sign of
    /// the phase: `-1` for the forward transform, `+1` for the inverse.
    fn axis_pass(&self, input: &[Complex64], axis: usize, sign: i32) -> Vec<Complex64> {
        let q = self.field.size();
        let table = self.field.product_characters();
        let stride = q.pow(axis as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        for_each_out!(out, |(j, slot): (usize, &mut Complex64)| {
            let b = (j / stride) % q;
            let base = j - b * stride;
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..q {
                let w = table[a * q + b];
                let w = if sign < 0 { w.conj() } else { w };
                acc += input[base + a * stride] * w;
            }
            *slot = acc;
        });
        out
    }

    /// `f^(xi) = sum_x f(x) e(-x . xi)`.
    pub fn fourier_forward(&self) -> Result<Grid> {
        if self.side != Side::Space {
            return Err(Error::WrongSide {
                expected: Side::Space,
                found: self.side,
            });
        }
        let mut data = self.values.clone();
        for axis in 0..self.n {
            data = self.axis_pass(&data, axis, -1);
        }
        Ok(Grid {
            field: self.field.clone(),
            n: self.n,
            side: Side::Frequency,
            values: data,
        })
    }

    /// `g^v(x) = |F|^-n sum_xi g(xi) e(x . xi)`.
    pub fn fourier_inverse(&self) -> Result<Grid> {
        if self.side != Side::Frequency {
            return Err(Error::WrongSide {
                expected: Side::Frequency,
                found: self.side,
            });
        }
        let mut data = self.values.clone();
        for axis in 0..self.n {
            data = self.axis_pass(&data, axis, 1);
        }
        let scale = 1.0 / data.len() as f64;
        for v in &mut data {
            *v *= scale;
        }
        Ok(Grid {
            field: self.field.clone(),
            n: self.n,
            side: Side::Space,
            values: data,
        })
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        match p {
            Exponent::Infinity => self.max_abs(),
            Exponent::Finite(_) => self.lp_norm_f64(p.to_f64()),
        }
    }

    /// Same as [`Grid::lp_norm`] with a real exponent; `f64::INFINITY` gives the sup norm.
    pub fn lp_norm_f64(&self, p: f64) -> f64 {
        weighted_lp(&self.values, self.weight(), p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `<f, g>` against the side's measure (conjugate-linear in `g`).
    pub fn inner(&self, other: &Grid) -> Result<Complex64> {
        self.check_same_shape(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.weight())
    }

    pub fn pointwise_mul(&self, other: &Grid) -> Result<Grid> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Grid {
            field: self.field.clone(),
            n: self.n,
            side: self.side,
            values,
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Grid {
        Grid {
            field: self.field.clone(),
            n: self.n,
            side: self.side,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Convolution in the side's measure: counting measure on `Space`,
    /// normalized measure on `Frequency`. Computed by transform, multiply, invert.
    pub fn convolve(&self, other: &Grid) -> Result<Grid> {
        self.check_same_shape(other)?;
        match self.side {
            Side::Space => {
                let prod = self
                    .fourier_forward()?
                    .pointwise_mul(&other.fourier_forward()?)?;
                prod.fourier_inverse()
            }
            Side::Frequency => {
                let prod = self
                    .fourier_inverse()?
                    .pointwise_mul(&other.fourier_inverse()?)?;
                prod.fourier_forward()
            }
        }
    }

    /// Header (`p`, `k`, `n`, side code as little-endian `u32`s) followed by
    /// little-endian `f64` real/imaginary pairs in index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 16 * self.values.len());
        for h in [
            self.field.characteristic(),
            self.field.degree(),
            self.n as u32,
            self.side.code(),
        ] {
            out.extend_from_slice(&h.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Grid> {
        if bytes.len() < 16 {
            return Err(Error::Decode("grid header truncated".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let field = FieldSpec::new(word(0), word(1))?;
        let n = word(2) as usize;
        let side = Side::from_code(word(3))?;
        let values = decode_complex(&bytes[16..])?;
        Grid::from_values(&field, n, side, values)
    }
}

pub(crate) fn weighted_lp(values: &[Complex64], weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let s: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
    (weight * s).powf(1.0 / p)
}

pub(crate) fn decode_complex(bytes: &[u8]) -> Result<Vec<Complex64>> {
    if !bytes.len().is_multiple_of(16) {
        return Err(Error::Decode(
            "value block is not a whole number of complex pairs".into(),
        ));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

/// `|<f1, f2>_dx - <f1^, f2^>_dxi|`.
pub fn parseval_defect(f1: &Grid, f2: &Grid) -> Result<f64> {
    if f1.side() != Side::Space || f2.side() != Side::Space {
        return Err(Error::SideMismatch);
    }
    let lhs = f1.inner(f2)?;
    let rhs = f1.fourier_forward()?.inner(&f2.fourier_forward()?)?;
    Ok((lhs - rhs).norm())
}

//! Sparse multivariate polynomials over a finite field.

use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    /// `(coefficient, exponent vector)`; kept normalized: no zero coefficients,
    /// no repeated exponent vectors, sorted by exponent vector.
    terms: Vec<(FieldElement, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(field: &FieldSpec, nvars: usize, terms: Vec<(FieldElement, Vec<u32>)>) -> Self {
        let mut p = Polynomial { nvars, terms };
        p.normalize(field);
        p
    }

    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: &FieldSpec, nvars: usize, c: FieldElement) -> Self {
        Self::new(field, nvars, vec![(c, vec![0; nvars])])
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(field: &FieldSpec, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::new(field, nvars, vec![(FieldElement::ONE, e)])
    }

    fn normalize(&mut self, field: &FieldSpec) {
        for (_, e) in &mut self.terms {
            e.resize(self.nvars, 0);
        }
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(FieldElement, Vec<u32>)> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms.drain(..) {
            match out.last_mut() {
                Some((c0, e0)) if *e0 == e => *c0 = field.add(*c0, c),
                _ => out.push((c, e)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        self.terms = out;
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(FieldElement, Vec<u32>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, field: &FieldSpec, x: &[FieldElement]) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (xi, &ei) in x.iter().zip(e) {
                if ei > 0 {
                    t = field.mul(t, field.pow(*xi, ei as u64));
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }

    pub fn add(&self, other: &Polynomial, field: &FieldSpec) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial::new(field, self.nvars, terms)
    }

    pub fn sub(&self, other: &Polynomial, field: &FieldSpec) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, e)| (field.neg(*c), e.clone())));
        Polynomial::new(field, self.nvars, terms)
    }

    pub fn mul(&self, other: &Polynomial, field: &FieldSpec) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((field.mul(*c1, *c2), e));
            }
        }
        Polynomial::new(field, self.nvars, terms)
    }

    pub fn scale(&self, c: FieldElement, field: &FieldSpec) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(a, e)| (field.mul(*a, c), e.clone()))
            .collect();
        Polynomial::new(field, self.nvars, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let f = FieldSpec::prime(7).unwrap();
        let x = Polynomial::var(&f, 2, 0);
        let t = Polynomial::var(&f, 2, 1);
        // x + t^2
        let p = x.add(&t.mul(&t, &f), &f);
        assert_eq!(p.degree(), 2);
        assert_eq!(
            p.eval(&f, &[FieldElement(3), FieldElement(4)]),
            FieldElement((3 + 16) % 7)
        );
        let zero = p.sub(&p, &f);
        assert!(zero.is_zero());
        assert_eq!(zero.degree(), 0);
    }
}

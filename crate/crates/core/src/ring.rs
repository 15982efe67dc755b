//! Graded polynomial rings, their graded pieces, and graded pieces of
//! quotients by homogeneous ideals (computed degree by degree with linear
//! algebra, no Gröbner engine).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{int, RationalEchelon, Scalar, SparseVec};

/// Exponent vector. Ordered graded-lexicographically with x₀ < x₁ < …:
/// first by total degree, then by the exponent of the highest variable,
/// and so on downwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    /// Removes one factor of variable `i`.
    pub fn lower(&self, i: usize) -> Option<Monomial> {
        let mut e = self.0.clone();
        e[i] = e[i].checked_sub(1)?;
        Some(Monomial(e))
    }

    pub fn raise(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with exact rational coefficients; no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Polynomial::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Polynomial::term(Monomial::var(nvars, i), Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.mul(m), v.clone()))
                .collect(),
        }
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The common degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// ∂/∂x_var.
    pub fn derive(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e > 0 {
                out.add_term(m.lower(var).unwrap(), c * int(e as i64));
            }
        }
        out
    }

    /// Σ xᵢ ∂/∂xᵢ.
    pub fn euler(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() > 0)
                .map(|(m, c)| (m.clone(), c * int(m.degree() as i64)))
                .collect(),
        }
    }

    /// Applies the derivation sending variable `i` to `images[i]`.
    pub fn apply_derivation(&self, images: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            for (i, img) in images.iter().enumerate() {
                let e = m.exponents()[i];
                if e == 0 || img.is_zero() {
                    continue;
                }
                let rest = m.lower(i).unwrap();
                let k = c * int(e as i64);
                for (a, v) in &img.terms {
                    out.add_term(rest.mul(a), &k * v);
                }
            }
        }
        out
    }

    pub fn format(&self, names: &VarNames) -> String {
        format_polynomial(self, names)
    }
}

/// How variables are written in the textual polynomial format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarNames {
    /// `x0, x1, …`
    Indexed(usize),
    /// Plücker coordinates `p<i><j>` of G(2,N), 1 ≤ i < j ≤ N, ordered
    /// lexicographically by pair. Indices ≥ 10 use `p<i>_<j>`.
    Plucker(usize),
}

impl VarNames {
    pub fn nvars(&self) -> usize {
        match self {
            VarNames::Indexed(n) => *n,
            VarNames::Plucker(n) => n * (n - 1) / 2,
        }
    }

    pub fn name(&self, var: usize) -> String {
        match self {
            VarNames::Indexed(_) => format!("x{var}"),
            VarNames::Plucker(n) => {
                let (i, j) = plucker_pair(*n, var);
                if i < 10 && j < 10 {
                    format!("p{i}{j}")
                } else {
                    format!("p{i}_{j}")
                }
            }
        }
    }

    fn lookup(&self, token: &str) -> Result<usize> {
        let bad = |msg: &str| Error::parse(token, msg);
        match self {
            VarNames::Indexed(n) => {
                let idx: usize = token
                    .strip_prefix('x')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("expected a variable x<i>"))?;
                if idx >= *n {
                    return Err(bad("variable index out of range"));
                }
                Ok(idx)
            }
            VarNames::Plucker(n) => {
                let body = token
                    .strip_prefix('p')
                    .ok_or_else(|| bad("expected a Plücker variable p<i><j>"))?;
                let (i, j) = if let Some((a, b)) = body.split_once('_') {
                    (a.parse::<usize>().ok(), b.parse::<usize>().ok())
                } else if body.len() == 2 && body.chars().all(|c| c.is_ascii_digit()) {
                    (body[..1].parse().ok(), body[1..].parse().ok())
                } else {
                    (None, None)
                };
                let (Some(i), Some(j)) = (i, j) else {
                    return Err(bad("expected a Plücker variable p<i><j>"));
                };
                if i == 0 || j > *n || i >= j {
                    return Err(bad("Plücker variable needs 1 <= i < j <= N"));
                }
                Ok(plucker_index(*n, i, j))
            }
        }
    }
}

/// Index of p_{ij} (1 ≤ i < j ≤ n) in lexicographic pair order.
pub fn plucker_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    // pairs (a, b) with a < i come first
    let before: usize = (1..i).map(|a| n - a).sum();
    before + (j - i - 1)
}

pub fn plucker_pair(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 1..n {
        let row = n - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    panic!("Plücker index out of range")
}

fn format_polynomial(p: &Polynomial, names: &VarNames) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // highest terms first reads more naturally
    for (k, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.degree() == 0 {
            factors.push(abs.to_string());
        }
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names.name(i)),
                _ => factors.push(format!("{}^{e}", names.name(i))),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Parses `coeff*x<i>^<e>*...` terms joined by `+`/`-`.
pub fn parse_polynomial(text: &str, names: &VarNames) -> Result<Polynomial> {
    let nvars = names.nvars();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::parse(text, "empty polynomial"));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut sign = false;
    let bytes = compact.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && i > 0 && bytes[i - 1] != b'^' {
            terms.push((sign, &compact[start..i]));
            sign = b == b'-';
            start = i + 1;
        } else if (b == b'+' || b == b'-') && i == 0 {
            sign = b == b'-';
            start = 1;
        }
    }
    terms.push((sign, &compact[start..]));

    let mut poly = Polynomial::zero(nvars);
    for (neg, body) in terms {
        if body.is_empty() {
            return Err(Error::parse(text, "empty term"));
        }
        let mut coeff = Scalar::one();
        let mut mono = Monomial::one(nvars);
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(Error::parse(body, "empty factor"));
            }
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                coeff *= parse_scalar(factor)?;
                continue;
            }
            let (var, exp) = match factor.split_once('^') {
                Some((v, e)) => {
                    let e: u32 = e
                        .parse()
                        .map_err(|_| Error::parse(factor, "bad exponent"))?;
                    (v, e)
                }
                None => (factor, 1),
            };
            let idx = names.lookup(var)?;
            let mut ex = mono.exponents().to_vec();
            ex[idx] += exp;
            mono = Monomial::new(ex);
        }
        if neg {
            coeff = -coeff;
        }
        poly.add_term(mono, coeff);
    }
    Ok(poly)
}

fn parse_scalar(token: &str) -> Result<Scalar> {
    let bad = || Error::parse(token, "bad coefficient");
    match token.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        }
        None => Ok(Scalar::from_integer(token.parse().map_err(|_| bad())?)),
    }
}

/// Ordered monomial basis of one graded component, with reverse lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    nvars: usize,
    degree: u32,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl GradedPiece {
    /// Builds a piece from distinct monomials of the given degree; they are
    /// sorted graded-lex.
    pub fn from_monomials(nvars: usize, degree: u32, mut basis: Vec<Monomial>) -> Self {
        basis.sort();
        basis.dedup();
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        GradedPiece {
            nvars,
            degree,
            basis,
            index,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of a polynomial supported on this basis.
    pub fn coords(&self, p: &Polynomial) -> Result<SparseVec> {
        let mut v: SparseVec = p
            .terms()
            .map(|(m, c)| {
                self.index_of(m).map(|i| (i, c.clone())).ok_or_else(|| {
                    Error::contract(format!("monomial {:?} not in the basis", m.exponents()))
                })
            })
            .collect::<Result<_>>()?;
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn polynomial(&self, coords: &[(usize, Scalar)]) -> Polynomial {
        Polynomial::from_terms(
            self.nvars,
            coords
                .iter()
                .map(|(i, c)| (self.basis[*i].clone(), c.clone())),
        )
    }
}

/// All monomials in `nvars` variables of total degree `degree`.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(var: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == cur.len() {
            cur[var] = left;
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[var] = e;
            rec(var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    if nvars == 0 {
        return if degree == 0 {
            vec![Monomial::new(vec![])]
        } else {
            vec![]
        };
    }
    let mut out = Vec::new();
    rec(0, degree, &mut vec![0; nvars], &mut out);
    out
}

pub fn graded_piece(nvars: usize, degree: u32) -> GradedPiece {
    GradedPiece::from_monomials(nvars, degree, monomials_of_degree(nvars, degree))
}

/// Degree-d component of ℚ[x]/I for a homogeneous ideal I.
#[derive(Debug, Clone)]
pub struct QuotientPiece {
    ambient: GradedPiece,
    piece: GradedPiece,
    echelon: RationalEchelon,
}

impl QuotientPiece {
    /// Standard-monomial basis of the quotient.
    pub fn piece(&self) -> &GradedPiece {
        &self.piece
    }

    pub fn ambient(&self) -> &GradedPiece {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.piece.dim()
    }

    /// Normal form: the unique representative supported on the standard
    /// monomials.
    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial> {
        let v = self.ambient.coords(p)?;
        let r = self.echelon.reduce(&v);
        Ok(self.ambient.polynomial(&r))
    }

    /// Coordinates of the normal form in the quotient basis.
    pub fn coords(&self, p: &Polynomial) -> Result<SparseVec> {
        self.piece.coords(&self.reduce(p)?)
    }

    pub fn in_ideal(&self, p: &Polynomial) -> Result<bool> {
        Ok(self.reduce(p)?.is_zero())
    }
}

pub fn quotient_piece(
    nvars: usize,
    ideal_gens: &[Polynomial],
    degree: u32,
) -> Result<QuotientPiece> {
    let mut gen_degrees = Vec::with_capacity(ideal_gens.len());
    for g in ideal_gens {
        if g.nvars() != nvars {
            return Err(Error::contract("ideal generator in the wrong ring"));
        }
        if g.is_zero() {
            gen_degrees.push(None);
            continue;
        }
        match g.homogeneous_degree() {
            Some(d) => gen_degrees.push(Some(d)),
            None => return Err(Error::contract("inhomogeneous ideal generator")),
        }
    }
    let ambient = graded_piece(nvars, degree);
    let mut echelon = RationalEchelon::new(ambient.dim());
    for (g, d) in ideal_gens.iter().zip(gen_degrees) {
        let Some(d) = d else { continue };
        if d > degree {
            continue;
        }
        for m in monomials_of_degree(nvars, degree - d) {
            let v = ambient.coords(&g.mul_monomial(&m))?;
            echelon.insert(v);
        }
    }
    let basis = echelon
        .non_pivots()
        .into_iter()
        .map(|i| ambient.basis()[i].clone())
        .collect();
    let piece = GradedPiece::from_monomials(nvars, degree, basis);
    Ok(QuotientPiece {
        ambient,
        piece,
        echelon,
    })
}

/// One three-term relation p_ac·p_bd − p_ab·p_cd − p_ad·p_bc for every
/// 1 ≤ a < b < c < d ≤ n; together they generate the ideal of G(2,n).
pub fn plucker_relations(n: usize) -> Vec<Polynomial> {
    let nv = n * (n - 1) / 2;
    let v = |i, j| plucker_index(n, i, j);
    let quad = |x: usize, y: usize| Monomial::var(nv, x).mul(&Monomial::var(nv, y));
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for d in c + 1..=n {
                    out.push(Polynomial::from_terms(
                        nv,
                        [
                            (quad(v(a, c), v(b, d)), int(1)),
                            (quad(v(a, b), v(c, d)), int(-1)),
                            (quad(v(a, d), v(b, c)), int(-1)),
                        ],
                    ));
                }
            }
        }
    }
    out
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Polynomial::term(self.clone(), Scalar::one());
        write!(f, "{}", p.format(&VarNames::Indexed(self.nvars())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn x(nv: usize, text: &str) -> Polynomial {
        parse_polynomial(text, &VarNames::Indexed(nv)).unwrap()
    }

    #[test]
    fn graded_piece_examples() {
        let p = graded_piece(2, 2);
        let shown: Vec<String> = p.basis().iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, vec!["x0^2", "x0*x1", "x1^2"]);
        assert_eq!(graded_piece(5, 0).dim(), 1);
        assert_eq!(graded_piece(6, 2).dim(), 21);
    }

    #[test]
    fn quotient_piece_of_g24() {
        let gens = plucker_relations(4);
        assert_eq!(gens.len(), 1);
        assert_eq!(quotient_piece(6, &gens, 0).unwrap().dim(), 1);
        assert_eq!(quotient_piece(6, &gens, 1).unwrap().dim(), 6);
        assert_eq!(quotient_piece(6, &gens, 2).unwrap().dim(), 20);
    }

    #[test]
    fn g24_matches_quadric_hilbert_series() {
        let gens = plucker_relations(4);
        for d in 0..=5u64 {
            let expect = binom(d + 5, 5) - if d >= 2 { binom(d + 3, 5) } else { 0 };
            assert_eq!(
                quotient_piece(6, &gens, d as u32).unwrap().dim() as u64,
                expect,
                "degree {d}"
            );
        }
    }

    #[test]
    fn unit_ideal_kills_positive_degrees() {
        let one = Polynomial::constant(3, int(1));
        assert_eq!(
            quotient_piece(3, std::slice::from_ref(&one), 2)
                .unwrap()
                .dim(),
            0
        );
        assert_eq!(quotient_piece(3, &[one], 0).unwrap().dim(), 0);
    }

    #[test]
    fn inhomogeneous_generator_rejected() {
        let g = x(2, "x0^2 + x1");
        assert!(matches!(
            quotient_piece(2, &[g], 3),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn derive_examples() {
        assert_eq!(x(3, "x0^3").derive(0), x(3, "3*x0^2"));
        assert!(x(3, "x0^2").derive(1).is_zero());
        assert_eq!(x(3, "x0*x1 + x0^2*x2").derive(0), x(3, "x1 + 2*x0*x2"));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(x(2, "x0^2*x1").euler(), x(2, "3*x0^2*x1"));
        assert!(x(2, "5").euler().is_zero());
        assert_eq!(x(2, "x0^2 + x0*x1").euler(), x(2, "2*x0^2 + 2*x0*x1"));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let p = x(3, "-2*x0^2*x1 + 1/3*x2 - 7");
        assert_eq!(p.format(&VarNames::Indexed(3)), "-2*x0^2*x1 + 1/3*x2 - 7");
        let names = VarNames::Plucker(4);
        let q = parse_polynomial("p12*p34 - p13*p24", &names).unwrap();
        assert_eq!(parse_polynomial(&q.format(&names), &names).unwrap(), q);
        let big = VarNames::Plucker(11);
        let r = parse_polynomial("p1_11*p3_10", &big).unwrap();
        assert_eq!(r.format(&big), "p1_11*p3_10");
    }

    #[test]
    fn parse_errors_name_the_token() {
        let err = parse_polynomial("x0 + y3", &VarNames::Indexed(2)).unwrap_err();
        assert!(matches!(err, Error::Parse { ref token, .. } if token == "y3"));
        assert!(parse_polynomial("x5", &VarNames::Indexed(2)).is_err());
        assert!(parse_polynomial("p31", &VarNames::Plucker(4)).is_err());
        assert!(parse_polynomial("x0 + ", &VarNames::Indexed(2)).is_err());
    }

    #[test]
    fn plucker_indexing_round_trips() {
        for n in 2..8 {
            let mut k = 0;
            for i in 1..=n {
                for j in i + 1..=n {
                    assert_eq!(plucker_index(n, i, j), k);
                    assert_eq!(plucker_pair(n, k), (i, j));
                    k += 1;
                }
            }
        }
    }

    fn homogeneous_poly(nv: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
        let monos = monomials_of_degree(nv, deg);
        proptest::collection::vec(-3i64..=3, monos.len()).prop_map(move |cs| {
            Polynomial::from_terms(nv, monos.iter().cloned().zip(cs.into_iter().map(int)))
        })
    }

    proptest! {
        #[test]
        fn euler_is_a_derivation(p in homogeneous_poly(3, 2), q in homogeneous_poly(3, 3)) {
            let lhs = p.mul(&q).euler();
            let rhs = p.euler().mul(&q).add(&p.mul(&q.euler()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn quotient_dim_bounded_by_ambient(deg in 0u32..5) {
            let gens = plucker_relations(4);
            let q = quotient_piece(6, &gens, deg).unwrap();
            prop_assert!(q.dim() <= binom(deg as u64 + 5, 5) as usize);
        }

        #[test]
        fn normal_form_is_a_projection(p in homogeneous_poly(6, 3)) {
            let q = quotient_piece(6, &plucker_relations(4), 3).unwrap();
            let once = q.reduce(&p).unwrap();
            prop_assert_eq!(q.reduce(&once).unwrap(), once.clone());
            // p − nf(p) lies in the ideal
            prop_assert!(q.in_ideal(&p.sub(&once)).unwrap());
        }
    }
}

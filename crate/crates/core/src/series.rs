//! Truncated multivariate power series over exact rationals.
//!
//! A series lives in a context: an ordered variable list, a strictly positive
//! rational weight per variable, and a rational cutoff. Every operation
//! discards terms of weighted total degree above the cutoff, so a value always
//! represents a class in the quotient by that degree filter.
//!
//! Invariants maintained by construction:
//! - no zero coefficient is stored;
//! - every stored exponent vector is componentwise nonnegative and has
//!   weighted degree at most the cutoff;
//! - binary operations require both operands to share the context.
//!
//! Canonical term order (serialization, display) is graded lexicographic:
//! weighted degree first, then lexicographic on exponent vectors.

use crate::error::{Error, Result};
use crate::rational::{ceil_to_usize, format_rational, parse_rational, rat_int, Rational};
use num::traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesContext {
    vars: Vec<String>,
    weights: Vec<Rational>,
    cutoff: Rational,
}

impl SeriesContext {
    pub fn new(vars: Vec<String>, weights: Vec<Rational>, cutoff: Rational) -> Result<Arc<Self>> {
        if vars.len() != weights.len() {
            return Err(Error::ContextMismatch(format!(
                "{} variables but {} weights",
                vars.len(),
                weights.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::Domain(format!("variable {i} has empty name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Domain(format!("duplicate variable name {v:?}")));
            }
        }
        for (v, w) in vars.iter().zip(&weights) {
            if !w.is_positive() {
                return Err(Error::Domain(format!(
                    "weight of {v:?} must be positive, got {}",
                    format_rational(w)
                )));
            }
        }
        if cutoff.is_negative() {
            return Err(Error::Domain(format!(
                "cutoff must be nonnegative, got {}",
                format_rational(&cutoff)
            )));
        }
        Ok(Arc::new(SeriesContext {
            vars,
            weights,
            cutoff,
        }))
    }

    /// Context with unit weights, the common case.
    pub fn unit_weights(vars: &[&str], cutoff: Rational) -> Arc<Self> {
        SeriesContext::new(
            vars.iter().map(|s| s.to_string()).collect(),
            vec![Rational::one(); vars.len()],
            cutoff,
        )
        .expect("unit-weight context is always valid")
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn weighted_degree(&self, exps: &[i64]) -> Rational {
        debug_assert_eq!(exps.len(), self.vars.len());
        let mut deg = Rational::zero();
        for (e, w) in exps.iter().zip(&self.weights) {
            if *e != 0 {
                deg += w * rat_int(*e);
            }
        }
        deg
    }

    fn min_weight(&self) -> Rational {
        self.weights
            .iter()
            .min()
            .cloned()
            .unwrap_or_else(Rational::one)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ctx: Arc<SeriesContext>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl TruncatedSeries {
    pub fn zero(ctx: Arc<SeriesContext>) -> Self {
        TruncatedSeries {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: Arc<SeriesContext>) -> Self {
        TruncatedSeries::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: Arc<SeriesContext>, c: Rational) -> Self {
        let mut s = TruncatedSeries::zero(ctx);
        s.insert(vec![0; s.ctx.vars.len()], c);
        s
    }

    /// The series `x_i`; truncates to zero if the variable's weight exceeds the cutoff.
    pub fn variable(ctx: Arc<SeriesContext>, i: usize) -> Result<Self> {
        if i >= ctx.vars.len() {
            return Err(Error::ContextMismatch(format!(
                "variable index {i} out of range (context has {})",
                ctx.vars.len()
            )));
        }
        let mut e = vec![0; ctx.vars.len()];
        e[i] = 1;
        let mut s = TruncatedSeries::zero(ctx);
        s.insert(e, Rational::one());
        Ok(s)
    }

    pub fn monomial(ctx: Arc<SeriesContext>, exps: Vec<i64>, coef: Rational) -> Result<Self> {
        if exps.len() != ctx.vars.len() {
            return Err(Error::ContextMismatch(format!(
                "exponent vector of length {} in a context with {} variables",
                exps.len(),
                ctx.vars.len()
            )));
        }
        if let Some(e) = exps.iter().find(|e| **e < 0) {
            return Err(Error::Domain(format!("negative exponent {e}")));
        }
        let mut s = TruncatedSeries::zero(ctx);
        s.insert(exps, coef);
        Ok(s)
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.ctx.vars.len()])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// True when the series has no constant term.
    pub fn positive_valuation(&self) -> bool {
        !self.terms.contains_key(&vec![0; self.ctx.vars.len()])
    }

    pub fn coeff(&self, exps: &[i64]) -> Rational {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical graded-lexicographic order.
    pub fn canonical_terms(&self) -> Vec<(Vec<i64>, Rational)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        v.sort_by(|(a, _), (b, _)| {
            self.ctx
                .weighted_degree(a)
                .cmp(&self.ctx.weighted_degree(b))
                .then_with(|| a.cmp(b))
        });
        v
    }

    fn insert(&mut self, exps: Vec<i64>, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        if self.ctx.weighted_degree(&exps) > self.ctx.cutoff {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn same_ctx(&self, other: &TruncatedSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "left context ({:?}, cutoff {}) vs right ({:?}, cutoff {})",
                self.ctx.vars,
                format_rational(&self.ctx.cutoff),
                other.ctx.vars,
                format_rational(&other.ctx.cutoff)
            )))
        }
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.ctx.clone());
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        if c.is_zero() {
            return TruncatedSeries::zero(self.ctx.clone());
        }
        let mut out = TruncatedSeries::zero(self.ctx.clone());
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_ctx(other)?;
        let mut out = TruncatedSeries::zero(self.ctx.clone());
        for (ea, ca) in &self.terms {
            let da = self.ctx.weighted_degree(ea);
            if da > self.ctx.cutoff {
                continue;
            }
            for (eb, cb) in &other.terms {
                if &da + self.ctx.weighted_degree(eb) > self.ctx.cutoff {
                    continue;
                }
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u64) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(self.ctx.clone());
        for _ in 0..n {
            acc = acc.mul(self).expect("same context");
        }
        acc
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.positive_valuation() {
            return Err(Error::Domain(format!(
                "exp needs zero constant term, got {}",
                format_rational(&self.constant_term())
            )));
        }
        let mut acc = TruncatedSeries::one(self.ctx.clone());
        let mut term = TruncatedSeries::one(self.ctx.clone());
        let mut k: u64 = 0;
        while !term.is_zero() {
            k += 1;
            term = term.mul(self)?.scale(&Rational::new(1.into(), k.into()));
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Logarithm of a series with constant term exactly 1.
    pub fn log(&self) -> Result<TruncatedSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::Domain(format!(
                "log needs constant term 1, got {}",
                format_rational(&self.constant_term())
            )));
        }
        let p = self.sub(&TruncatedSeries::one(self.ctx.clone()))?;
        let mut acc = TruncatedSeries::zero(self.ctx.clone());
        let mut pk = TruncatedSeries::one(self.ctx.clone());
        let mut k: u64 = 0;
        loop {
            k += 1;
            pk = pk.mul(&p)?;
            if pk.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pk.scale(&Rational::new(sign.into(), k.into())))?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert_unit(&self) -> Result<TruncatedSeries> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Domain(
                "inverse needs a nonzero constant term".into(),
            ));
        }
        let cinv = c.recip();
        // (c(1+p))^-1 = c^-1 sum (-p)^k
        let p = self
            .scale(&cinv)
            .sub(&TruncatedSeries::one(self.ctx.clone()))?;
        let mut acc = TruncatedSeries::one(self.ctx.clone());
        let mut pk = TruncatedSeries::one(self.ctx.clone());
        loop {
            pk = pk.mul(&p)?.neg();
            if pk.is_zero() {
                break;
            }
            acc = acc.add(&pk)?;
        }
        Ok(acc.scale(&cinv))
    }

    /// Formal composition: replace each bound variable by its series.
    ///
    /// Unbound variables pass through. Bindings must share this context.
    /// Truncation is coherent when every binding has positive valuation; a
    /// binding with a nonzero constant term is accepted (exponents are
    /// nonnegative, so the expansion is finite) but composes filtrations only
    /// up to the cutoff of the inputs.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<usize, TruncatedSeries>,
    ) -> Result<TruncatedSeries> {
        for (i, b) in bindings {
            if *i >= self.ctx.vars.len() {
                return Err(Error::ContextMismatch(format!(
                    "binding for variable index {i} out of range"
                )));
            }
            self.same_ctx(b)?;
        }
        let mut out = TruncatedSeries::zero(self.ctx.clone());
        // Powers of each binding, grown on demand.
        let mut powers: BTreeMap<usize, Vec<TruncatedSeries>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut unbound = e.clone();
            let mut factors: Vec<(usize, i64)> = Vec::new();
            for (i, k) in e.iter().enumerate() {
                if *k > 0 && bindings.contains_key(&i) {
                    unbound[i] = 0;
                    factors.push((i, *k));
                }
            }
            let mut acc = TruncatedSeries::monomial(self.ctx.clone(), unbound, c.clone())?;
            for (i, k) in factors {
                let cache = powers.entry(i).or_insert_with(|| {
                    vec![TruncatedSeries::one(self.ctx.clone()), bindings[&i].clone()]
                });
                while (cache.len() as i64) <= k {
                    let next = cache.last().unwrap().mul(&bindings[&i])?;
                    cache.push(next);
                }
                acc = acc.mul(&cache[k as usize])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Re-truncate to a smaller (or equal) cutoff; the result lives in the
    /// correspondingly tightened context.
    pub fn truncate_to(&self, cutoff: Rational) -> Result<TruncatedSeries> {
        if cutoff > self.ctx.cutoff {
            return Err(Error::Domain(format!(
                "cannot raise cutoff from {} to {}",
                format_rational(&self.ctx.cutoff),
                format_rational(&cutoff)
            )));
        }
        let ctx = SeriesContext::new(self.ctx.vars.clone(), self.ctx.weights.clone(), cutoff)?;
        let mut out = TruncatedSeries::zero(ctx);
        for (e, c) in &self.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    /// Divide by the variable `i` (every term must contain it).
    fn shift_down(&self, i: usize) -> Result<TruncatedSeries> {
        let mut out = TruncatedSeries::zero(self.ctx.clone());
        for (e, c) in &self.terms {
            if e[i] < 1 {
                return Err(Error::Domain(format!(
                    "term not divisible by {:?}",
                    self.ctx.vars[i]
                )));
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c.clone());
        }
        Ok(out)
    }
}

/// Invert a coordinate family `f_a = x_a * (1 + higher order)`, one component
/// per context variable, by fixed-point iteration. The result `g` satisfies
/// `f(g) = identity` up to the cutoff, and is the unique such family.
pub fn reverse_family(family: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
    let first = family
        .first()
        .ok_or_else(|| Error::Domain("empty family".into()))?;
    let ctx = first.ctx.clone();
    let n = ctx.vars.len();
    if family.len() != n {
        return Err(Error::ContextMismatch(format!(
            "family has {} components for {} variables",
            family.len(),
            n
        )));
    }
    let mut units = Vec::with_capacity(n);
    for (a, f) in family.iter().enumerate() {
        first.same_ctx(f)?;
        let u = f.shift_down(a).map_err(|_| {
            Error::Domain(format!(
                "component {a} is not divisible by {:?}",
                ctx.vars[a]
            ))
        })?;
        if !u.constant_term().is_one() {
            return Err(Error::Domain(format!(
                "component {a} must be {:?} times a series with constant term 1",
                ctx.vars[a]
            )));
        }
        units.push(u);
    }
    let mut g: Vec<TruncatedSeries> = (0..n)
        .map(|a| TruncatedSeries::variable(ctx.clone(), a))
        .collect::<Result<_>>()?;
    let max_iter = ceil_to_usize(&(ctx.cutoff() / ctx.min_weight())) + 2;
    for _ in 0..max_iter {
        let bindings: BTreeMap<usize, TruncatedSeries> =
            g.iter().cloned().enumerate().collect();
        let mut next = Vec::with_capacity(n);
        for a in 0..n {
            let u_at_g = units[a].substitute(&bindings)?;
            let xa = TruncatedSeries::variable(ctx.clone(), a)?;
            next.push(xa.mul(&u_at_g.invert_unit()?)?);
        }
        if next == g {
            return Ok(g);
        }
        g = next;
    }
    Err(Error::Numeric(
        "family reversion did not stabilize within the degree bound".into(),
    ))
}

// --- serialization ---

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i64>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    vars: Vec<String>,
    weights: Vec<String>,
    cutoff: String,
    terms: Vec<TermJson>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let j = SeriesJson {
            vars: self.ctx.vars.clone(),
            weights: self.ctx.weights.iter().map(format_rational).collect(),
            cutoff: format_rational(&self.ctx.cutoff),
            terms: self
                .canonical_terms()
                .into_iter()
                .map(|(e, c)| TermJson {
                    exp: e,
                    coef: format_rational(&c),
                })
                .collect(),
        };
        j.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(deserializer)?;
        let weights = j
            .weights
            .iter()
            .map(|w| parse_rational(w))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let cutoff = parse_rational(&j.cutoff).map_err(D::Error::custom)?;
        let ctx = SeriesContext::new(j.vars, weights, cutoff).map_err(D::Error::custom)?;
        let mut s = TruncatedSeries::zero(ctx.clone());
        for (k, t) in j.terms.iter().enumerate() {
            if t.exp.len() != ctx.vars().len() {
                return Err(D::Error::custom(format!(
                    "terms[{k}].exp has length {}, expected {}",
                    t.exp.len(),
                    ctx.vars().len()
                )));
            }
            if t.exp.iter().any(|e| *e < 0) {
                return Err(D::Error::custom(format!(
                    "terms[{k}].exp has a negative entry"
                )));
            }
            if ctx.weighted_degree(&t.exp) > *ctx.cutoff() {
                return Err(D::Error::custom(format!(
                    "terms[{k}] exceeds the cutoff"
                )));
            }
            if s.terms.contains_key(&t.exp) {
                return Err(D::Error::custom(format!(
                    "terms[{k}] repeats an exponent vector"
                )));
            }
            let c = parse_rational(&t.coef).map_err(D::Error::custom)?;
            s.insert(t.exp.clone(), c);
        }
        Ok(s)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.canonical_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != 0)
                .map(|(i, p)| {
                    if *p == 1 {
                        self.ctx.vars[i].clone()
                    } else {
                        format!("{}^{}", self.ctx.vars[i], p)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

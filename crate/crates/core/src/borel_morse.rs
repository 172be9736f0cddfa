//! Morse cochain complexes on finite approximations of Borel constructions,
//! with exact rational cohomology ranks and a gradient-flow checker for the
//! connecting trajectories behind the Morse differential.
//!
//! The approximation space for an ell-torus at order N carries one odd
//! generator X_i of degree 1 and one even generator lambda_i of degree 2 per
//! circle factor, the lambda-exponents truncated at N. A basis cochain is
//! a subset S of {1..ell} times a fiber basis element times an exponent
//! vector a in {0..N}^ell, of degree |S| + deg(fiber) + 2*sum(a). The
//! differential removes one X at a time, raising the matching exponent,
//! and applies the fiber differential with the Koszul sign of |S|:
//!
//!   d(S (x) p (x) a) = sum_k (-1)^(k-1) (S \ i_k) (x) p (x) (a + e_{i_k})
//!                      + (-1)^|S| S (x) d_P(p) (x) a,
//!
//! terms with a_{i_k} = N dropped. This squares to zero for every fiber
//! whose own differential does, and the cohomology of the point-fiber
//! complex has Poincare polynomial (1 + t^(2N+1))^ell.
//!
//! The flow checker integrates dtheta/dt = -(a(t) sin(theta) +
//! b(t) sin(theta - angle)) with a smoothstep handover a(t) from the model
//! field to the perturbed one, using an adaptive embedded Runge-Kutta 4(5)
//! stepper. A trajectory connects when it emanates from the unstable point
//! pi and lands, after the handover, at the angle matching the target
//! generator.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::rational_rank;
use crate::rational::Rational;

/// Cochain complex used as the fiber of the approximation bundle. The
/// differential raises degree by one and squares to zero; both facts are
/// checked by `validate`.
#[derive(Debug, Clone)]
pub struct FiberComplex {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    /// differential[j] lists (target index, coefficient) pairs of d(e_j).
    pub differential: Vec<Vec<(usize, Rational)>>,
}

impl FiberComplex {
    /// Single generator in degree 0, zero differential.
    pub fn point() -> Self {
        FiberComplex {
            labels: vec!["1".into()],
            degrees: vec![0],
            differential: vec![Vec::new()],
        }
    }

    /// Two generators in degrees 0 and 2, zero differential; the Morse
    /// model of a two-sphere fiber.
    pub fn two_sphere() -> Self {
        FiberComplex {
            labels: vec!["1".into(), "c".into()],
            degrees: vec![0, 2],
            differential: vec![Vec::new(), Vec::new()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::Validation("fiber complex has no generators".into()));
        }
        if self.degrees.len() != self.labels.len() || self.differential.len() != self.labels.len() {
            return Err(Error::Validation(
                "fiber complex fields have mismatched lengths".into(),
            ));
        }
        for (j, row) in self.differential.iter().enumerate() {
            for (t, c) in row {
                if *t >= self.labels.len() {
                    return Err(Error::Validation(format!(
                        "fiber differential of {} hits out-of-range index {t}",
                        self.labels[j]
                    )));
                }
                if self.degrees[*t] != self.degrees[j] + 1 {
                    return Err(Error::Validation(format!(
                        "fiber differential of {} does not raise degree by 1",
                        self.labels[j]
                    )));
                }
                if c.is_zero() {
                    return Err(Error::Validation(
                        "fiber differential stores a zero coefficient".into(),
                    ));
                }
            }
        }
        // d^2 = 0 on the fiber
        for j in 0..self.labels.len() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, c) in &self.differential[j] {
                for (t2, c2) in &self.differential[*t] {
                    let e = acc.entry(*t2).or_insert_with(Rational::zero);
                    *e += c * c2;
                }
            }
            if acc.values().any(|v| !v.is_zero()) {
                return Err(Error::Validation(format!(
                    "fiber differential does not square to zero at {}",
                    self.labels[j]
                )));
            }
        }
        Ok(())
    }
}

/// Basis cochain: X-subset as a bitmask over {1..ell}, fiber basis index,
/// lambda exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseGenerator {
    pub mask: u32,
    pub fiber: usize,
    pub exponents: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BorelComplex {
    pub ell: usize,
    pub order: usize,
    pub fiber: FiberComplex,
    pub generators: Vec<MorseGenerator>,
}

impl BorelComplex {
    pub fn build(ell: usize, order: usize, fiber: FiberComplex) -> Result<Self> {
        fiber.validate()?;
        if ell > 16 {
            return Err(Error::Validation(format!(
                "ell = {ell} is too large for an explicit basis"
            )));
        }
        let per = (order + 1).pow(ell as u32) as u128 * (1u128 << ell) * fiber.len() as u128;
        if per > 200_000 {
            return Err(Error::Validation(format!(
                "complex with {per} generators exceeds the explicit-basis budget"
            )));
        }
        let mut generators = Vec::with_capacity(per as usize);
        for mask in 0..(1u32 << ell) {
            for f in 0..fiber.len() {
                let mut exps = vec![0usize; ell];
                loop {
                    generators.push(MorseGenerator {
                        mask,
                        fiber: f,
                        exponents: exps.clone(),
                    });
                    // odometer with the last slot fastest
                    let mut pos = ell;
                    while pos > 0 {
                        if exps[pos - 1] < order {
                            exps[pos - 1] += 1;
                            break;
                        }
                        exps[pos - 1] = 0;
                        pos -= 1;
                    }
                    if pos == 0 {
                        break;
                    }
                }
            }
        }
        Ok(BorelComplex {
            ell,
            order,
            fiber,
            generators,
        })
    }

    fn index_of(&self, mask: u32, fiber: usize, exps: &[usize]) -> usize {
        let base = self.order + 1;
        let mut e = 0usize;
        for &a in exps {
            e = e * base + a;
        }
        (mask as usize * self.fiber.len() + fiber) * base.pow(self.ell as u32) + e
    }

    pub fn degree(&self, idx: usize) -> i64 {
        let g = &self.generators[idx];
        g.mask.count_ones() as i64
            + self.fiber.degrees[g.fiber]
            + 2 * g.exponents.iter().sum::<usize>() as i64
    }

    pub fn label(&self, idx: usize) -> String {
        let g = &self.generators[idx];
        let mut parts = Vec::new();
        for i in 0..self.ell {
            if g.mask >> i & 1 == 1 {
                parts.push(format!("X{}", i + 1));
            }
        }
        for (i, a) in g.exponents.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("l{}", i + 1)),
                _ => parts.push(format!("l{}^{a}", i + 1)),
            }
        }
        if self.fiber.labels[g.fiber] != "1" {
            parts.push(self.fiber.labels[g.fiber].clone());
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    /// d of one basis cochain as sorted (target index, coefficient) pairs.
    pub fn differential(&self, idx: usize) -> Vec<(usize, Rational)> {
        let g = &self.generators[idx];
        let mut out: Vec<(usize, Rational)> = Vec::new();
        let mut sign = Rational::one();
        for i in 0..self.ell {
            if g.mask >> i & 1 == 0 {
                continue;
            }
            if g.exponents[i] < self.order {
                let mut exps = g.exponents.clone();
                exps[i] += 1;
                let target = self.index_of(g.mask & !(1 << i), g.fiber, &exps);
                out.push((target, sign.clone()));
            }
            sign = -sign;
        }
        let koszul = if g.mask.count_ones() % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (t, c) in &self.fiber.differential[g.fiber] {
            let target = self.index_of(g.mask, *t, &g.exponents);
            out.push((target, &koszul * c));
        }
        out.sort_by_key(|(t, _)| *t);
        out
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for idx in 0..self.generators.len() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, c) in self.differential(idx) {
                for (t2, c2) in self.differential(t) {
                    let e = acc.entry(t2).or_insert_with(Rational::zero);
                    *e += &c * &c2;
                }
            }
            if let Some((bad, _)) = acc.iter().find(|(_, v)| !v.is_zero()) {
                return Err(Error::Validation(format!(
                    "d^2({}) has a nonzero component at {}",
                    self.label(idx),
                    self.label(*bad)
                )));
            }
        }
        Ok(())
    }

    /// Exact cohomology ranks by degree, zero degrees omitted.
    pub fn cohomology_ranks(&self) -> BTreeMap<i64, usize> {
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for idx in 0..self.generators.len() {
            by_degree.entry(self.degree(idx)).or_default().push(idx);
        }
        let mut rank_out: BTreeMap<i64, usize> = BTreeMap::new();
        for (d, gens) in &by_degree {
            let Some(above) = by_degree.get(&(d + 1)) else {
                rank_out.insert(*d, 0);
                continue;
            };
            let pos: BTreeMap<usize, usize> =
                above.iter().enumerate().map(|(p, i)| (*i, p)).collect();
            let rows: Vec<Vec<Rational>> = gens
                .iter()
                .map(|g| {
                    let mut row = vec![Rational::zero(); above.len()];
                    for (t, c) in self.differential(*g) {
                        row[pos[&t]] = c;
                    }
                    row
                })
                .collect();
            rank_out.insert(*d, rational_rank(rows));
        }
        let mut betti = BTreeMap::new();
        for (d, gens) in &by_degree {
            let out = rank_out.get(d).copied().unwrap_or(0);
            let into = rank_out.get(&(d - 1)).copied().unwrap_or(0);
            let b = gens.len() - out - into;
            if b > 0 {
                betti.insert(*d, b);
            }
        }
        betti
    }
}

/// Betti numbers of the point-fiber complex: binomial(ell, k) in degree
/// k * (2N + 1).
pub fn expected_point_betti(ell: usize, order: usize) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    let mut binom: usize = 1;
    for k in 0..=ell {
        out.insert((k * (2 * order + 1)) as i64, binom);
        binom = binom * (ell - k) / (k + 1);
    }
    out
}

/// Adaptive embedded Runge-Kutta-Fehlberg 4(5) step for a scalar ODE.
fn rk45<F: Fn(f64, f64) -> f64>(f: F, t0: f64, t1: f64, y0: f64, tol: f64) -> f64 {
    let mut t = t0;
    let mut y = y0;
    let mut h = (t1 - t0) / 64.0;
    let min_h = 1e-12;
    for _ in 0..2_000_000 {
        if t >= t1 {
            break;
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let k1 = f(t, y);
        let k2 = f(t + h / 4.0, y + h * k1 / 4.0);
        let k3 = f(t + 3.0 * h / 8.0, y + h * (3.0 * k1 + 9.0 * k2) / 32.0);
        let k4 = f(
            t + 12.0 * h / 13.0,
            y + h * (1932.0 * k1 - 7200.0 * k2 + 7296.0 * k3) / 2197.0,
        );
        let k5 = f(
            t + h,
            y + h * (439.0 * k1 / 216.0 - 8.0 * k2 + 3680.0 * k3 / 513.0 - 845.0 * k4 / 4104.0),
        );
        let k6 = f(
            t + h / 2.0,
            y + h
                * (-8.0 * k1 / 27.0 + 2.0 * k2 - 3544.0 * k3 / 2565.0 + 1859.0 * k4 / 4104.0
                    - 11.0 * k5 / 40.0),
        );
        let y5 = y
            + h * (16.0 * k1 / 135.0
                + 6656.0 * k3 / 12825.0
                + 28561.0 * k4 / 56430.0
                - 9.0 * k5 / 50.0
                + 2.0 * k6 / 55.0);
        let y4 = y
            + h * (25.0 * k1 / 216.0 + 1408.0 * k3 / 2565.0 + 2197.0 * k4 / 4104.0 - k5 / 5.0);
        let err = (y5 - y4).abs();
        if err <= tol || h <= min_h {
            t += h;
            y = y5;
        }
        let scale = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            5.0
        };
        h *= scale.clamp(0.2, 5.0);
        if h < min_h {
            h = min_h;
        }
    }
    y
}

fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * (3.0 - 2.0 * x)
    }
}

fn arccot(x: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - x.atan()
}

#[derive(Debug, Clone)]
pub struct FlowReport {
    pub source: usize,
    pub target: usize,
    pub angle: f64,
    pub theta0: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub connects: bool,
}

/// Check whether the handover flow connects generator `source` to
/// generator `target` at the given angular offset. The trajectory starts
/// at `theta0` (default: just below pi for source = target, 0 otherwise),
/// its backward limit is read off the unperturbed model flow, and its
/// forward value is integrated to a fixed horizon.
pub fn flow_verify(
    source: usize,
    target: usize,
    angle: f64,
    tolerance: f64,
    theta0: Option<f64>,
) -> Result<FlowReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::Domain("flow tolerance must be positive".into()));
    }
    if !angle.is_finite() {
        return Err(Error::Domain("flow angle must be finite".into()));
    }
    let pi = std::f64::consts::PI;
    let horizon: f64 = 30.0;
    let smoothing = 1.0;
    let theta0 = theta0.unwrap_or(if source == target { pi - 1e-6 } else { 0.0 });

    let near_pi = tolerance.max(2e-6);
    let theta_minus = if (theta0 - pi).abs() <= near_pi {
        pi
    } else {
        2.0 * arccot(horizon.exp() / (theta0 / 2.0).tan())
    };

    let ln2 = std::f64::consts::LN_2;
    let field = |t: f64, th: f64| {
        let a = smoothstep((ln2 - t) / smoothing);
        let b = 1.0 - a;
        -(a * th.sin() + b * (th - angle).sin())
    };
    let theta_plus = rk45(field, 0.0, horizon, theta0, 1e-9);

    let delta = if source == target { angle } else { 0.0 };
    let connects = (theta_minus - pi).abs() <= tolerance && (theta_plus + delta).abs() <= tolerance;
    Ok(FlowReport {
        source,
        target,
        angle,
        theta0,
        theta_minus,
        theta_plus,
        connects,
    })
}

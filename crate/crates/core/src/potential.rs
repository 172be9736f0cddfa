//! The equivariant disc potential of a toric fiber: assembly from the
//! corrected coefficient series, numeric evaluation, and critical points.
//!
//! A potential is a finite sum, one term per ray, of
//! coefficient_i(q) * T^{area_i} * exp(v_i . x), plus the equivariant part
//! sum_j lambda_j * (u_j . x). Coefficients are corrected disc-count series
//! in the Kahler variables; numeric routines specialize q_a to t^{area of
//! generator a} for a Novikov parameter t in (0, 1). The x-variables stay
//! complex exponents (the equivariant part is linear in x, so Laurent
//! variables would not close up); critical points are reported modulo
//! 2 pi i shifts in each coordinate, with the imaginary parts folded into
//! [0, 2 pi) and values taken at that representative.

use crate::error::{Error, Result};
use crate::linalg::rational_rank;
use crate::mirror::mirror_map;
use crate::rational::{format_rational, rat_int, rational_to_f64, Rational};
use crate::series::TruncatedSeries;
use crate::toric::{validate, CurveClass, ToricInput};
use num::complex::Complex64;
use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct PotentialTerm {
    /// Corrected disc-count series in the Kahler variables, constant term 1.
    pub coefficient: TruncatedSeries,
    /// Area of the basic disc class at this ray.
    pub area: Rational,
    /// The ray vector; the term carries exp(exponent . x).
    pub exponent: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct EquivariantPotential {
    pub dim: usize,
    pub terms: Vec<PotentialTerm>,
    /// Subtorus directions with their parameter names.
    pub equivariant_part: Vec<(Vec<i64>, String)>,
    /// Mori generators indexing the Kahler variables of the coefficients.
    pub generators: Vec<CurveClass>,
    /// Areas of the generators, used when specializing q to powers of t.
    pub generator_areas: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct CritPoint {
    pub x: Vec<Complex64>,
    pub value: Complex64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct CritOutcome {
    pub points: Vec<CritPoint>,
    pub warning: Option<String>,
}

/// Subtorus rows from a compact description: rows separated by ';',
/// entries by ','. "1,0;0,1" is the full two-torus.
pub fn parse_subtorus_spec(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Validation(format!("bad subtorus entry {e:?}")))
                })
                .collect()
        })
        .collect()
}

pub fn build_potential(
    input: &ToricInput,
    subtorus: &[Vec<i64>],
    cutoff: &Rational,
) -> Result<EquivariantPotential> {
    validate(input)?;
    if subtorus.len() > input.dim {
        return Err(Error::Validation(format!(
            "subtorus rank {} exceeds dimension {}",
            subtorus.len(),
            input.dim
        )));
    }
    for (j, u) in subtorus.iter().enumerate() {
        if u.len() != input.dim {
            return Err(Error::Validation(format!(
                "subtorus vector {j} has length {}, expected {}",
                u.len(),
                input.dim
            )));
        }
        if u.iter().all(|c| *c == 0) {
            return Err(Error::Validation(format!("subtorus vector {j} is zero")));
        }
    }
    let rows: Vec<Vec<Rational>> = subtorus
        .iter()
        .map(|u| u.iter().map(|c| rat_int(*c)).collect())
        .collect();
    if rational_rank(rows) != subtorus.len() {
        return Err(Error::Validation(
            "subtorus vectors are linearly dependent".into(),
        ));
    }
    let map = mirror_map(input, cutoff)?;
    let terms = input
        .rays
        .iter()
        .zip(&input.areas)
        .zip(&map.corrected)
        .map(|((ray, area), coef)| {
            debug_assert!(coef.constant_term() == rat_int(1));
            PotentialTerm {
                coefficient: coef.clone(),
                area: area.clone(),
                exponent: ray.clone(),
            }
        })
        .collect();
    let generator_areas = map
        .generators
        .iter()
        .map(|g| g.area(&input.areas))
        .collect();
    Ok(EquivariantPotential {
        dim: input.dim,
        terms,
        equivariant_part: subtorus
            .iter()
            .enumerate()
            .map(|(j, u)| (u.clone(), format!("lambda{}", j + 1)))
            .collect(),
        generators: map.generators,
        generator_areas,
    })
}

/// The potential with every Novikov datum specialized at a numeric t.
struct Specialized {
    /// coefficient_i(t) * t^{area_i} per term
    coefs: Vec<f64>,
    rays: Vec<Vec<f64>>,
    directions: Vec<Vec<f64>>,
}

fn specialize(pot: &EquivariantPotential, t: f64) -> Result<Specialized> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "Novikov parameter t must lie in (0, 1), got {t}"
        )));
    }
    let coefs = pot
        .terms
        .iter()
        .map(|term| {
            let mut c = 0.0;
            for (e, r) in term.coefficient.canonical_terms() {
                let mut deg = Rational::zero();
                for (k, w) in e.iter().zip(&pot.generator_areas) {
                    deg += rat_int(*k) * w;
                }
                c += rational_to_f64(&r) * t.powf(rational_to_f64(&deg));
            }
            c * t.powf(rational_to_f64(&term.area))
        })
        .collect();
    Ok(Specialized {
        coefs,
        rays: pot
            .terms
            .iter()
            .map(|term| term.exponent.iter().map(|v| *v as f64).collect())
            .collect(),
        directions: pot
            .equivariant_part
            .iter()
            .map(|(u, _)| u.iter().map(|v| *v as f64).collect())
            .collect(),
    })
}

fn check_args(pot: &EquivariantPotential, x: &[Complex64], lambda: &[Complex64]) -> Result<()> {
    if x.len() != pot.dim {
        return Err(Error::Validation(format!(
            "expected {} x-coordinates, got {}",
            pot.dim,
            x.len()
        )));
    }
    if lambda.len() != pot.equivariant_part.len() {
        return Err(Error::Validation(format!(
            "expected {} lambda values, got {}",
            pot.equivariant_part.len(),
            lambda.len()
        )));
    }
    Ok(())
}

fn dot(v: &[f64], x: &[Complex64]) -> Complex64 {
    v.iter()
        .zip(x)
        .map(|(c, xi)| xi * *c)
        .sum()
}

impl Specialized {
    fn value(&self, x: &[Complex64], lambda: &[Complex64]) -> Complex64 {
        let mut w = Complex64::new(0.0, 0.0);
        for (c, v) in self.coefs.iter().zip(&self.rays) {
            w += dot(v, x).exp() * *c;
        }
        for (u, l) in self.directions.iter().zip(lambda) {
            w += l * dot(u, x);
        }
        w
    }

    fn gradient(&self, x: &[Complex64], lambda: &[Complex64]) -> Vec<Complex64> {
        let d = x.len();
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        for (c, v) in self.coefs.iter().zip(&self.rays) {
            let e = dot(v, x).exp() * *c;
            for k in 0..d {
                g[k] += e * v[k];
            }
        }
        for (u, l) in self.directions.iter().zip(lambda) {
            for k in 0..d {
                g[k] += l * u[k];
            }
        }
        g
    }

    fn hessian(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        let d = x.len();
        let mut h = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for (c, v) in self.coefs.iter().zip(&self.rays) {
            let e = dot(v, x).exp() * *c;
            for r in 0..d {
                for s in 0..d {
                    h[r][s] += e * (v[r] * v[s]);
                }
            }
        }
        h
    }
}

pub fn evaluate(
    pot: &EquivariantPotential,
    t: f64,
    x: &[Complex64],
    lambda: &[Complex64],
) -> Result<Complex64> {
    check_args(pot, x, lambda)?;
    Ok(specialize(pot, t)?.value(x, lambda))
}

pub fn gradient(
    pot: &EquivariantPotential,
    t: f64,
    x: &[Complex64],
    lambda: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_args(pot, x, lambda)?;
    Ok(specialize(pot, t)?.gradient(x, lambda))
}

fn grad_norm(g: &[Complex64]) -> f64 {
    g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|i, j| a[*i][k].norm().total_cmp(&a[*j][k].norm()))?;
        if a[p][k].norm() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
            let t = b[k];
            b[i] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

fn fold_imaginary(x: &mut [Complex64]) {
    for z in x.iter_mut() {
        let mut im = z.im.rem_euclid(2.0 * PI);
        if 2.0 * PI - im < 1e-9 {
            im = 0.0;
        }
        *z = Complex64::new(z.re, im);
    }
}

fn circular_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(p, q)| {
        if (p.re - q.re).abs() > tol {
            return false;
        }
        let d = (p.im - q.im).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= tol
    })
}

fn point_order(a: &CritPoint, b: &CritPoint) -> std::cmp::Ordering {
    a.value
        .re
        .total_cmp(&b.value.re)
        .then_with(|| a.value.im.total_cmp(&b.value.im))
        .then_with(|| {
            for (p, q) in a.x.iter().zip(&b.x) {
                let o = p.re.total_cmp(&q.re).then_with(|| p.im.total_cmp(&q.im));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
}

/// Newton search for critical points of the lambda-deformed potential from
/// seeded random starts. Converged solutions are deduplicated modulo
/// 2 pi i translations (tolerance 1e-8) and ordered by value, then by
/// coordinates. An empty result with a warning means no run converged.
pub fn critical_points(
    pot: &EquivariantPotential,
    t: f64,
    lambda: &[Complex64],
    seeds: usize,
    rng_seed: u64,
) -> Result<CritOutcome> {
    if seeds == 0 {
        return Err(Error::Validation("seed count must be positive".into()));
    }
    if pot.dim != pot.terms[0].exponent.len() {
        return Err(Error::Validation("inconsistent potential dimensions".into()));
    }
    if lambda.len() != pot.equivariant_part.len() {
        return Err(Error::Validation(format!(
            "expected {} lambda values, got {}",
            pot.equivariant_part.len(),
            lambda.len()
        )));
    }
    let sp = specialize(pot, t)?;
    let d = pot.dim;
    let max_l1 = pot
        .terms
        .iter()
        .map(|term| term.exponent.iter().map(|c| c.abs()).sum::<i64>())
        .max()
        .unwrap_or(1) as f64;
    let r = (t.ln().abs() * max_l1).max(5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut found: Vec<CritPoint> = Vec::new();
    for _ in 0..seeds {
        let mut x: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.gen_range(-r..r), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let mut ok = false;
        for _ in 0..80 {
            let g = sp.gradient(&x, lambda);
            if grad_norm(&g) <= 1e-12 {
                ok = true;
                break;
            }
            let h = sp.hessian(&x);
            let Some(step) = solve_complex(h, g.iter().map(|z| -z).collect()) else {
                break;
            };
            for (xi, s) in x.iter_mut().zip(&step) {
                *xi += s;
            }
            if x.iter().any(|z| z.re.abs() > 60.0 || !z.re.is_finite()) {
                break;
            }
        }
        if !ok {
            continue;
        }
        fold_imaginary(&mut x);
        let g = sp.gradient(&x, lambda);
        let norm = grad_norm(&g);
        if norm > 1e-10 {
            continue;
        }
        // a run that drifted far outside the search box has found the
        // vanishing tail of the exponentials, not a critical point
        if x.iter().any(|z| z.re.abs() > r + 1.0) {
            continue;
        }
        let value = sp.value(&x, lambda);
        let point = CritPoint {
            x,
            value,
            grad_norm: norm,
        };
        match found
            .iter_mut()
            .find(|p| circular_close(&p.x, &point.x, 1e-8))
        {
            Some(existing) => {
                if point_order(&point, existing) == std::cmp::Ordering::Less {
                    *existing = point;
                }
            }
            None => found.push(point),
        }
    }
    found.sort_by(point_order);
    let warning = if found.is_empty() {
        Some("no Newton run converged; increase the seed count or adjust t".to_string())
    } else {
        None
    };
    Ok(CritOutcome {
        points: found,
        warning,
    })
}

fn linear_form(coeffs: &[i64], names: &str) -> String {
    let mut s = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let mag = c.abs();
        if s.is_empty() {
            if *c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if *c < 0 { " - " } else { " + " });
        }
        if mag != 1 {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&format!("{names}{}", k + 1));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl EquivariantPotential {
    /// Human-readable sum of terms.
    pub fn pretty(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for term in &self.terms {
            let mut p = String::new();
            if term.coefficient.num_terms() != 1
                || term.coefficient.constant_term() != rat_int(1)
            {
                p.push_str(&format!("({})*", term.coefficient));
            }
            p.push_str(&format!(
                "T^{{{}}}*e^{{{}}}",
                format_rational(&term.area),
                linear_form(&term.exponent, "x")
            ));
            parts.push(p);
        }
        for (u, name) in &self.equivariant_part {
            parts.push(format!("{name}*({})", linear_form(u, "x")));
        }
        parts.join(" + ")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "terms": self.terms.iter().map(|term| serde_json::json!({
                "coefficient": serde_json::to_value(&term.coefficient).unwrap(),
                "area": format_rational(&term.area),
                "exponent": term.exponent,
            })).collect::<Vec<_>>(),
            "equivariant": self.equivariant_part.iter().map(|(u, name)| serde_json::json!({
                "direction": u,
                "name": name,
            })).collect::<Vec<_>>(),
            "generators": self.generators,
            "generator_areas": self.generator_areas.iter().map(format_rational).collect::<Vec<_>>(),
        })
    }
}

//! Smooth toric fan data: validation, the curve-class lattice, wall curve
//! classes, and constrained enumeration of effective classes.
//!
//! A fan is given by its rays (primitive integer vectors), its maximal cones
//! (index sets into the rays), and one positive rational disc area per ray.
//! Validation rejects non-primitive or repeated rays and non-unimodular
//! cones outright; completeness is decided by facet pairing for dimension
//! at most three and trusted from the input flag above that. Geometric cone
//! overlap is detected exactly in dimension two and combinatorially (a facet
//! shared by more than two cones) in dimension three.
//!
//! Curve classes are stored as intersection vectors (D_1.C, .., D_m.C); the
//! class area is sum_i (D_i.C) * area_i, which can legitimately vanish for
//! c1 = 0 classes when areas are equal. Area-bounded enumeration therefore
//! guards against nonpositive generator areas, while the multiplicity-bounded
//! variant used by the mirror-map layer needs no such guard.

use crate::error::{Error, Result};
use crate::linalg::{self, LinSolve};
use crate::rational::{format_rational, parse_rational, rat_int, Rational};
use num::bigint::BigInt;
use num::traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub struct ToricInput {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub areas: Vec<Rational>,
    pub mori: Option<Vec<Vec<i64>>>,
    pub assert_complete: bool,
}

/// Intersection numbers (D_1.C, .., D_m.C) of a curve class with the toric
/// divisors, indexed like the input rays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    /// Pairing with the anticanonical divisor: the sum of all entries.
    pub fn c1(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Symplectic area, the area-weighted sum of the entries.
    pub fn area(&self, areas: &[Rational]) -> Rational {
        let mut a = Rational::zero();
        for (c, w) in self.0.iter().zip(areas) {
            a += rat_int(*c) * w;
        }
        a
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub complete: bool,
    pub smooth: bool,
    pub semi_fano: Option<bool>,
    pub fano: Option<bool>,
    pub notes: Vec<String>,
}

impl ToricInput {
    pub fn new(
        dim: usize,
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
        areas: Vec<Rational>,
    ) -> Self {
        ToricInput {
            dim,
            rays,
            cones,
            areas,
            mori: None,
            assert_complete: false,
        }
    }

    pub fn with_mori(mut self, mori: Vec<Vec<i64>>) -> Self {
        self.mori = Some(mori);
        self
    }

    /// Parse the fan input schema, reporting violations with JSON-pointer
    /// paths. Unknown keys are tolerated.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::schema("/", format!("invalid JSON: {e}")))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema("/", "expected an object"))?;
        let dim = obj
            .get("dim")
            .and_then(|d| d.as_u64())
            .filter(|d| *d >= 1)
            .ok_or_else(|| Error::schema("/dim", "expected a positive integer"))?
            as usize;
        let rays_v = obj
            .get("rays")
            .and_then(|r| r.as_array())
            .ok_or_else(|| Error::schema("/rays", "expected an array"))?;
        let mut rays = Vec::with_capacity(rays_v.len());
        for (i, rv) in rays_v.iter().enumerate() {
            rays.push(int_vector(rv, dim, &format!("/rays/{i}"))?);
        }
        let cones_v = obj
            .get("cones")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::schema("/cones", "expected an array"))?;
        let mut cones = Vec::with_capacity(cones_v.len());
        for (k, cv) in cones_v.iter().enumerate() {
            let arr = cv
                .as_array()
                .ok_or_else(|| Error::schema(format!("/cones/{k}"), "expected an array"))?;
            let mut cone = Vec::with_capacity(arr.len());
            for (l, x) in arr.iter().enumerate() {
                let idx = x.as_u64().ok_or_else(|| {
                    Error::schema(format!("/cones/{k}/{l}"), "expected a nonnegative ray index")
                })? as usize;
                cone.push(idx);
            }
            cones.push(cone);
        }
        let areas_v = obj
            .get("areas")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Error::schema("/areas", "expected an array"))?;
        let mut areas = Vec::with_capacity(areas_v.len());
        for (i, av) in areas_v.iter().enumerate() {
            areas.push(rational_value(av, &format!("/areas/{i}"))?);
        }
        let mori = match obj.get("mori") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::Array(rows)) => {
                let mut out = Vec::with_capacity(rows.len());
                for (a, row) in rows.iter().enumerate() {
                    out.push(int_vector(row, rays.len(), &format!("/mori/{a}"))?);
                }
                Some(out)
            }
            Some(_) => return Err(Error::schema("/mori", "expected an array of integer vectors")),
        };
        let assert_complete = match obj.get("assert_complete") {
            None | Some(serde_json::Value::Null) => false,
            Some(serde_json::Value::Bool(b)) => *b,
            Some(_) => return Err(Error::schema("/assert_complete", "expected a boolean")),
        };
        Ok(ToricInput {
            dim,
            rays,
            cones,
            areas,
            mori,
            assert_complete,
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("dim".into(), (self.dim as u64).into());
        obj.insert("rays".into(), serde_json::json!(self.rays));
        obj.insert("cones".into(), serde_json::json!(self.cones));
        obj.insert(
            "areas".into(),
            serde_json::json!(self.areas.iter().map(format_rational).collect::<Vec<_>>()),
        );
        if let Some(m) = &self.mori {
            obj.insert("mori".into(), serde_json::json!(m));
        }
        if self.assert_complete {
            obj.insert("assert_complete".into(), true.into());
        }
        serde_json::Value::Object(obj)
    }
}

fn int_vector(v: &serde_json::Value, len: usize, path: &str) -> Result<Vec<i64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(path, format!("expected an array of length {len}")))?;
    if arr.len() != len {
        return Err(Error::schema(
            path,
            format!("expected length {len}, got {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(j, x)| {
            x.as_i64()
                .ok_or_else(|| Error::schema(format!("{path}/{j}"), "expected an integer"))
        })
        .collect()
}

fn rational_value(v: &serde_json::Value, path: &str) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => {
            parse_rational(s).map_err(|e| Error::schema(path, e.to_string()))
        }
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(rat_int)
            .ok_or_else(|| Error::schema(path, "expected an integer or a \"p/q\" string")),
        _ => Err(Error::schema(path, "expected a rational as \"p/q\" string")),
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn basic_checks(input: &ToricInput) -> Result<()> {
    if input.dim == 0 {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    let m = input.rays.len();
    if m == 0 {
        return Err(Error::Validation("fan has no rays".into()));
    }
    for (i, r) in input.rays.iter().enumerate() {
        if r.len() != input.dim {
            return Err(Error::Validation(format!(
                "ray {i} has length {}, expected {}",
                r.len(),
                input.dim
            )));
        }
        let g = r.iter().fold(0i64, |acc, x| gcd_i64(acc, *x));
        if g != 1 {
            return Err(Error::Validation(format!("non-primitive ray {i}")));
        }
        for (j, r2) in input.rays.iter().enumerate().take(i) {
            if r == r2 {
                return Err(Error::Validation(format!("repeated ray {i} (same as {j})")));
            }
        }
    }
    if input.areas.len() != m {
        return Err(Error::Validation(format!(
            "expected {m} areas, got {}",
            input.areas.len()
        )));
    }
    for (i, a) in input.areas.iter().enumerate() {
        if !a.is_positive() {
            return Err(Error::Validation(format!("area {i} must be positive")));
        }
    }
    if input.cones.is_empty() {
        return Err(Error::Validation("fan has no maximal cones".into()));
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (k, c) in input.cones.iter().enumerate() {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != c.len() {
            return Err(Error::Validation(format!("cone {k} repeats a ray index")));
        }
        if let Some(bad) = c.iter().find(|i| **i >= m) {
            return Err(Error::Validation(format!(
                "cone {k} references ray {bad}, but there are only {m} rays"
            )));
        }
        if c.len() > input.dim {
            return Err(Error::Validation(format!(
                "cone {k} has more rays than the dimension"
            )));
        }
        if !seen.insert(sorted.clone()) {
            return Err(Error::Validation(format!("repeated maximal cone {k}")));
        }
        let cone_rays: Vec<Vec<i64>> = c.iter().map(|i| input.rays[*i].clone()).collect();
        if !linalg::extends_to_basis(&cone_rays, input.dim) {
            return Err(Error::Validation(format!("non-unimodular maximal cone {k}")));
        }
    }
    if input.dim == 2 {
        check_sector_overlap(input)?;
    }
    if let Some(mori) = &input.mori {
        for (a, row) in mori.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Validation(format!(
                    "mori generator {a} has length {}, expected {m}",
                    row.len()
                )));
            }
            if row.iter().all(|c| *c == 0) {
                return Err(Error::Validation(format!("mori generator {a} is zero")));
            }
            for d in 0..input.dim {
                let s: i64 = row.iter().zip(&input.rays).map(|(c, v)| c * v[d]).sum();
                if s != 0 {
                    return Err(Error::Validation(format!(
                        "mori generator {a} is not in the relation lattice"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn cross(a: &[i64], b: &[i64]) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

/// Exact overlap test for plane fans: no ray may lie strictly inside another
/// maximal cone's sector.
fn check_sector_overlap(input: &ToricInput) -> Result<()> {
    for (k, c) in input.cones.iter().enumerate() {
        if c.len() != 2 {
            continue;
        }
        let (p, q) = if cross(&input.rays[c[0]], &input.rays[c[1]]) > 0 {
            (c[0], c[1])
        } else {
            (c[1], c[0])
        };
        for (k2, c2) in input.cones.iter().enumerate() {
            if k2 == k {
                continue;
            }
            for i in c2 {
                if *i == p || *i == q {
                    continue;
                }
                let w = &input.rays[*i];
                if cross(&input.rays[p], w) > 0 && cross(w, &input.rays[q]) > 0 {
                    return Err(Error::Validation(format!(
                        "overlapping cones: ray {i} of cone {k2} lies inside cone {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Facets of the maximal cones: key is the sorted facet index set, value
/// lists (cone index, opposite ray) pairs.
fn facet_map(input: &ToricInput) -> BTreeMap<Vec<usize>, Vec<(usize, usize)>> {
    let mut map: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, c) in input.cones.iter().enumerate() {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        for p in 0..sorted.len() {
            let mut facet = sorted.clone();
            let opposite = facet.remove(p);
            map.entry(facet).or_default().push((k, opposite));
        }
    }
    map
}

/// Completeness by facet pairing (exact for dimension <= 3, trusted from
/// the input flag above that). Pushes explanatory notes; errors on facets
/// shared by more than two cones.
fn completeness(input: &ToricInput, notes: &mut Vec<String>) -> Result<bool> {
    if input.dim > 3 {
        notes.push(if input.assert_complete {
            "completeness asserted by the input (dimension > 3, not checked)".into()
        } else {
            "completeness not checked (dimension > 3) and not asserted".into()
        });
        return Ok(input.assert_complete);
    }
    if input.cones.iter().any(|c| c.len() != input.dim) {
        notes.push("a maximal cone is not full-dimensional; fan is not complete".into());
        return Ok(false);
    }
    let mut complete = true;
    for (facet, adj) in facet_map(input) {
        match adj.len() {
            1 => {
                notes.push(format!(
                    "facet {facet:?} of cone {} is unpaired; fan is not complete",
                    adj[0].0
                ));
                complete = false;
            }
            2 => {}
            _ => {
                return Err(Error::Validation(format!(
                    "overlapping cones: facet {facet:?} is shared by {} cones",
                    adj.len()
                )))
            }
        }
    }
    Ok(complete)
}

pub fn validate(input: &ToricInput) -> Result<ValidationReport> {
    basic_checks(input)?;
    let mut notes = Vec::new();
    let complete = completeness(input, &mut notes)?;
    notes.push(format!(
        "{} maximal cones, all unimodular",
        input.cones.len()
    ));
    let generators = if input.mori.is_some() {
        Some(mori_generators(input)?)
    } else if complete {
        wall_curve_classes(input).ok()
    } else {
        None
    };
    let (semi_fano, fano) = match &generators {
        Some(gens) => {
            let c1s: Vec<i64> = gens.iter().map(|g| g.c1()).collect();
            if let Some(z) = gens.iter().find(|g| g.c1() == 0) {
                notes.push(format!("c1 = 0 Mori generator present: {:?}", z.0));
            }
            (
                Some(c1s.iter().all(|c| *c >= 0)),
                Some(c1s.iter().all(|c| *c > 0)),
            )
        }
        None => {
            notes.push(
                "semi-Fano status undetermined: needs a complete fan or mori generators".into(),
            );
            (None, None)
        }
    };
    Ok(ValidationReport {
        complete,
        smooth: true,
        semi_fano,
        fano,
        notes,
    })
}

/// Saturated integer basis of { c in Z^m : sum_i c_i v_i = 0 }, in Hermite
/// normal form for determinism.
pub fn relation_lattice(input: &ToricInput) -> Result<Vec<Vec<i64>>> {
    basic_checks(input)?;
    let a: Vec<Vec<BigInt>> = (0..input.dim)
        .map(|d| input.rays.iter().map(|r| BigInt::from(r[d])).collect())
        .collect();
    let kernel = linalg::integer_kernel(&a);
    kernel
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    i64::try_from(&x).map_err(|_| {
                        Error::Numeric("relation lattice entry exceeds i64".into())
                    })
                })
                .collect()
        })
        .collect()
}

/// Curve classes of the walls (codimension-one cones shared by two maximal
/// cones), normalized so the two opposite-ray coefficients are +1, with
/// redundant classes (nonnegative integer combinations of the others)
/// removed. For complete smooth fans these generate the effective cone.
pub fn wall_curve_classes(input: &ToricInput) -> Result<Vec<CurveClass>> {
    basic_checks(input)?;
    if input.cones.iter().any(|c| c.len() != input.dim) {
        return Err(Error::Validation(
            "wall classes need full-dimensional maximal cones; supply mori generators instead"
                .into(),
        ));
    }
    let m = input.rays.len();
    let mut classes: BTreeSet<CurveClass> = BTreeSet::new();
    for (facet, adj) in facet_map(input) {
        match adj.len() {
            2 => {}
            1 => {
                return Err(Error::Validation(format!(
                    "fan is not complete (facet {facet:?} of cone {} is unpaired); supply mori generators",
                    adj[0].0
                )))
            }
            _ => {
                return Err(Error::Validation(format!(
                    "overlapping cones: facet {facet:?} is shared by {} cones",
                    adj.len()
                )))
            }
        }
        let (r, r2) = (adj[0].1, adj[1].1);
        // Solve sum_{k in facet} c_k v_k = -(v_r + v_r2) over the rationals;
        // smoothness makes the solution unique and integral.
        let a: Vec<Vec<Rational>> = (0..input.dim)
            .map(|d| facet.iter().map(|k| rat_int(input.rays[*k][d])).collect())
            .collect();
        let b: Vec<Rational> = (0..input.dim)
            .map(|d| rat_int(-(input.rays[r][d] + input.rays[r2][d])))
            .collect();
        let coeffs = if facet.is_empty() {
            if b.iter().any(|x| !x.is_zero()) {
                return Err(Error::Validation(
                    "wall relation unsolvable: opposite rays do not cancel".into(),
                ));
            }
            Vec::new()
        } else {
            match linalg::solve_exact(&a, &b) {
                LinSolve::Unique(x) => x,
                LinSolve::Inconsistent => {
                    return Err(Error::Validation(format!(
                        "facet {facet:?} supports no wall relation; fan data is inconsistent"
                    )))
                }
                LinSolve::Underdetermined => {
                    return Err(Error::Validation(format!(
                        "facet {facet:?} rays are dependent; fan is not simplicial"
                    )))
                }
            }
        };
        let mut class = vec![0i64; m];
        class[r] += 1;
        class[r2] += 1;
        for (k, c) in facet.iter().zip(&coeffs) {
            if !c.is_integer() {
                return Err(Error::Validation(format!(
                    "wall relation at facet {facet:?} is not integral"
                )));
            }
            class[*k] += i64::try_from(c.to_integer())
                .map_err(|_| Error::Numeric("wall relation coefficient exceeds i64".into()))?;
        }
        classes.insert(CurveClass(class));
    }
    Ok(reduce_to_extremals(classes.into_iter().collect()))
}

/// Drop every class that is a nonnegative integer combination of the rest.
/// Larger classes (descending lex) are tried first so the survivors are the
/// extremal ones; ties cannot arise because the input set is duplicate-free.
fn reduce_to_extremals(mut classes: Vec<CurveClass>) -> Vec<CurveClass> {
    classes.sort();
    classes.reverse();
    loop {
        let mut dropped = None;
        for i in 0..classes.len() {
            let others: Vec<&CurveClass> = classes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c)
                .collect();
            if is_nonneg_combo(&classes[i], &others) {
                dropped = Some(i);
                break;
            }
        }
        match dropped {
            Some(i) => {
                classes.remove(i);
            }
            None => break,
        }
    }
    classes.sort();
    classes
}

fn is_nonneg_combo(target: &CurveClass, others: &[&CurveClass]) -> bool {
    if others.is_empty() {
        return false;
    }
    let m = target.0.len();
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|row| others.iter().map(|c| rat_int(c.0[row])).collect())
        .collect();
    let b: Vec<Rational> = target.0.iter().map(|x| rat_int(*x)).collect();
    match linalg::solve_exact(&a, &b) {
        LinSolve::Unique(x) => x.iter().all(|c| c.is_integer() && !c.is_negative()),
        LinSolve::Inconsistent => false,
        LinSolve::Underdetermined => {
            // Dependent candidate set: bounded search over small multiplicities.
            fn search(rem: &[i64], others: &[&CurveClass], idx: usize, budget: u32) -> bool {
                if rem.iter().all(|x| *x == 0) {
                    return true;
                }
                if idx == others.len() {
                    return false;
                }
                let mut cur = rem.to_vec();
                for used in 0..=budget {
                    if used > 0 {
                        for (c, g) in cur.iter_mut().zip(&others[idx].0) {
                            *c -= g;
                        }
                    }
                    if search(&cur, others, idx + 1, budget - used) {
                        return true;
                    }
                }
                false
            }
            search(&target.0, others, 0, 16)
        }
    }
}

/// The Mori generators: user-supplied if present, otherwise the wall classes.
pub fn mori_generators(input: &ToricInput) -> Result<Vec<CurveClass>> {
    basic_checks(input)?;
    match &input.mori {
        Some(rows) => Ok(rows.iter().map(|r| CurveClass(r.clone())).collect()),
        None => wall_curve_classes(input),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerateConstraints {
    /// Keep only classes with c1(C) equal to this value.
    pub c1_equals: Option<i64>,
    /// Keep only classes with D.C < 0 at this ray and D.C >= 0 elsewhere.
    pub negative_at: Option<usize>,
}

impl EnumerateConstraints {
    fn admits(&self, class: &CurveClass) -> bool {
        if let Some(c1) = self.c1_equals {
            if class.c1() != c1 {
                return false;
            }
        }
        if let Some(r) = self.negative_at {
            if class.0[r] >= 0 {
                return false;
            }
            if class.0.iter().enumerate().any(|(j, c)| j != r && *c < 0) {
                return false;
            }
        }
        true
    }
}

/// All nonzero nonnegative integer combinations of the Mori generators with
/// area at most `cutoff`, filtered by the constraints, sorted by area then
/// lexicographically. Every generator must have strictly positive area or
/// the search would not terminate.
pub fn enumerate_effective(
    input: &ToricInput,
    constraints: EnumerateConstraints,
    cutoff: &Rational,
) -> Result<Vec<CurveClass>> {
    if !cutoff.is_positive() {
        return Err(Error::Domain("enumeration cutoff must be positive".into()));
    }
    let gens = mori_generators(input)?;
    if let Some(r) = constraints.negative_at {
        if r >= input.rays.len() {
            return Err(Error::Validation(format!(
                "negative_at ray index {r} out of range"
            )));
        }
    }
    let weights: Vec<Rational> = gens.iter().map(|g| g.area(&input.areas)).collect();
    for (a, w) in weights.iter().enumerate() {
        if !w.is_positive() {
            return Err(Error::Domain(format!(
                "Mori generator {a} has area {} <= 0; area-bounded enumeration would not terminate",
                format_rational(w)
            )));
        }
    }
    let mut found: BTreeMap<CurveClass, Rational> = BTreeMap::new();
    let m = input.rays.len();
    fn go(
        gens: &[CurveClass],
        weights: &[Rational],
        idx: usize,
        class: &mut Vec<i64>,
        area: Rational,
        cutoff: &Rational,
        any: bool,
        found: &mut BTreeMap<CurveClass, Rational>,
    ) {
        if idx == gens.len() {
            if any {
                found
                    .entry(CurveClass(class.clone()))
                    .or_insert(area);
            }
            return;
        }
        let mut area_k = area.clone();
        let mut k = 0u64;
        loop {
            if area_k > *cutoff {
                break;
            }
            go(gens, weights, idx + 1, class, area_k.clone(), cutoff, any || k > 0, found);
            k += 1;
            area_k += &weights[idx];
            for (c, g) in class.iter_mut().zip(&gens[idx].0) {
                *c += g;
            }
            if area_k > *cutoff {
                // undo the multiplicities added at this level before returning
                for (c, g) in class.iter_mut().zip(&gens[idx].0) {
                    *c -= g * k as i64;
                }
                break;
            }
        }
    }
    let mut class = vec![0i64; m];
    go(
        &gens,
        &weights,
        0,
        &mut class,
        Rational::zero(),
        cutoff,
        false,
        &mut found,
    );
    let mut out: Vec<(Rational, CurveClass)> = found
        .into_iter()
        .filter(|(c, _)| constraints.admits(c))
        .map(|(c, a)| (a, c))
        .collect();
    out.sort_by(|(a1, c1), (a2, c2)| a1.cmp(a2).then_with(|| c1.cmp(c2)));
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

/// Combinations of Mori generators with total multiplicity at most
/// `max_degree`, with the multiplicity vectors kept. Used by the mirror-map
/// layer, whose series are graded by generator multiplicity (classes with
/// c1 = 0 can have area zero, so area grading is unusable there). When two
/// multiplicity vectors give the same class the lexicographically smallest
/// is kept.
pub(crate) fn enumerate_by_multiplicity(
    input: &ToricInput,
    constraints: EnumerateConstraints,
    max_degree: usize,
) -> Result<Vec<(Vec<u64>, CurveClass)>> {
    let gens = mori_generators(input)?;
    if let Some(r) = constraints.negative_at {
        if r >= input.rays.len() {
            return Err(Error::Validation(format!(
                "negative_at ray index {r} out of range"
            )));
        }
    }
    let mut found: BTreeMap<CurveClass, Vec<u64>> = BTreeMap::new();
    let mut mults = vec![0u64; gens.len()];
    fn go(
        gens: &[CurveClass],
        idx: usize,
        budget: usize,
        mults: &mut Vec<u64>,
        class: &mut Vec<i64>,
        found: &mut BTreeMap<CurveClass, Vec<u64>>,
    ) {
        if idx == gens.len() {
            if mults.iter().any(|m| *m > 0) {
                let key = CurveClass(class.clone());
                match found.get_mut(&key) {
                    Some(old) if *old <= *mults => {}
                    _ => {
                        found.insert(key, mults.clone());
                    }
                }
            }
            return;
        }
        for k in 0..=budget as u64 {
            mults[idx] = k;
            if k > 0 {
                for (c, g) in class.iter_mut().zip(&gens[idx].0) {
                    *c += g;
                }
            }
            go(gens, idx + 1, budget - k as usize, mults, class, found);
        }
        for (c, g) in class.iter_mut().zip(&gens[idx].0) {
            *c -= g * budget as i64;
        }
        mults[idx] = 0;
    }
    let mut class = vec![0i64; input.rays.len()];
    go(&gens, 0, max_degree, &mut mults, &mut class, &mut found);
    let mut out: Vec<(Vec<u64>, CurveClass)> = found
        .into_iter()
        .filter(|(c, _)| constraints.admits(c))
        .map(|(c, m)| (m, c))
        .collect();
    out.sort_by(|(m1, _), (m2, _)| {
        let d1: u64 = m1.iter().sum();
        let d2: u64 = m2.iter().sum();
        d1.cmp(&d2).then_with(|| m1.cmp(m2))
    });
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::fixtures::{f2, ones, p1xp1, p2};
    use super::*;
    use crate::rational::rat;

    #[test]
    fn validate_p2_fano() {
        let r = validate(&p2()).unwrap();
        assert!(r.complete && r.smooth);
        assert_eq!(r.semi_fano, Some(true));
        assert_eq!(r.fano, Some(true));
    }

    #[test]
    fn projective_line_walls() {
        let p1 = super::fixtures::p1();
        let r = validate(&p1).unwrap();
        assert!(r.complete);
        assert_eq!(r.fano, Some(true));
        assert_eq!(relation_lattice(&p1).unwrap(), vec![vec![1, 1]]);
        assert_eq!(
            wall_curve_classes(&p1).unwrap(),
            vec![CurveClass(vec![1, 1])]
        );
    }

    #[test]
    fn validate_f2_semi_fano_not_fano() {
        let r = validate(&f2(ones(4))).unwrap();
        assert!(r.complete && r.smooth);
        assert_eq!(r.semi_fano, Some(true));
        assert_eq!(r.fano, Some(false));
    }

    #[test]
    fn validate_rejects_bad_rays() {
        let mut bad = p2();
        bad.rays[0] = vec![2, 0];
        bad.cones = vec![vec![0, 1]];
        let e = validate(&bad).unwrap_err().to_string();
        assert!(e.contains("non-primitive ray 0"), "{e}");

        let mut dup = p2();
        dup.rays[2] = vec![1, 0];
        let e = validate(&dup).unwrap_err().to_string();
        assert!(e.contains("repeated ray"), "{e}");
    }

    #[test]
    fn validate_rejects_non_unimodular_cone() {
        let bad = ToricInput::new(
            2,
            vec![vec![1, 1], vec![-1, 1]],
            vec![vec![0, 1]],
            vec![rat_int(1), rat_int(1)],
        );
        let e = validate(&bad).unwrap_err().to_string();
        assert!(e.contains("non-unimodular maximal cone 0"), "{e}");
    }

    #[test]
    fn validate_rejects_overlapping_sectors() {
        let bad = ToricInput::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1], vec![2, 1]],
            ones(3),
        );
        let e = validate(&bad).unwrap_err().to_string();
        assert!(e.contains("overlapping"), "{e}");
    }

    #[test]
    fn affine_plane_incomplete_no_relations() {
        let c2 = ToricInput::new(
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1]],
            ones(2),
        );
        let r = validate(&c2).unwrap();
        assert!(!r.complete);
        assert!(r.smooth);
        assert_eq!(r.semi_fano, None);
        assert_eq!(r.fano, None);
        assert!(relation_lattice(&c2).unwrap().is_empty());
        assert!(wall_curve_classes(&c2)
            .unwrap_err()
            .to_string()
            .contains("mori"));
    }

    #[test]
    fn relation_lattice_golden() {
        assert_eq!(relation_lattice(&p2()).unwrap(), vec![vec![1, 1, 1]]);
        let basis = relation_lattice(&f2(ones(4))).unwrap();
        assert_eq!(basis, vec![vec![1, 0, 1, 2], vec![0, 1, 0, 1]]);
        for b in &basis {
            let fan = f2(ones(4));
            for d in 0..2 {
                let s: i64 = b.iter().zip(&fan.rays).map(|(c, v)| c * v[d]).sum();
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn wall_classes_golden() {
        assert_eq!(
            wall_curve_classes(&p2()).unwrap(),
            vec![CurveClass(vec![1, 1, 1])]
        );
        assert_eq!(
            wall_curve_classes(&f2(ones(4))).unwrap(),
            vec![
                CurveClass(vec![0, 1, 0, 1]),
                CurveClass(vec![1, -2, 1, 0]),
            ]
        );
        assert_eq!(
            wall_curve_classes(&p1xp1()).unwrap(),
            vec![
                CurveClass(vec![0, 0, 1, 1]),
                CurveClass(vec![1, 1, 0, 0]),
            ]
        );
    }

    #[test]
    fn wall_classes_commute_with_ray_permutation() {
        // same P^2 fan with rays listed in a different order
        let perm = ToricInput::new(
            2,
            vec![vec![-1, -1], vec![1, 0], vec![0, 1]],
            vec![vec![1, 2], vec![2, 0], vec![0, 1]],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        assert_eq!(
            wall_curve_classes(&perm).unwrap(),
            vec![CurveClass(vec![1, 1, 1])]
        );
    }

    #[test]
    fn every_class_is_a_relation() {
        for input in [p2(), f2(ones(4)), p1xp1()] {
            for class in wall_curve_classes(&input).unwrap() {
                for d in 0..input.dim {
                    let s: i64 = class
                        .0
                        .iter()
                        .zip(&input.rays)
                        .map(|(c, v)| c * v[d])
                        .sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn enumerate_f2_chekanov_pattern() {
        // areas chosen so both generators have class area 1
        let fan = f2(vec![rat_int(1), rat(1, 2), rat_int(1), rat(1, 2)]);
        let classes = enumerate_effective(
            &fan,
            EnumerateConstraints {
                c1_equals: Some(0),
                negative_at: Some(1),
            },
            &rat_int(3),
        )
        .unwrap();
        assert_eq!(
            classes,
            vec![
                CurveClass(vec![1, -2, 1, 0]),
                CurveClass(vec![2, -4, 2, 0]),
                CurveClass(vec![3, -6, 3, 0]),
            ]
        );
    }

    #[test]
    fn enumerate_p2_no_c1_zero() {
        let classes = enumerate_effective(
            &p2(),
            EnumerateConstraints {
                c1_equals: Some(0),
                ..Default::default()
            },
            &rat_int(5),
        )
        .unwrap();
        assert!(classes.is_empty());
    }

    #[test]
    fn enumerate_small_cutoff_empty() {
        let classes =
            enumerate_effective(&p2(), EnumerateConstraints::default(), &rat(1, 2)).unwrap();
        assert!(classes.is_empty());
    }

    #[test]
    fn enumerate_rejects_zero_area_generator() {
        // equal areas make the c1 = 0 section class area zero
        let e = enumerate_effective(&f2(ones(4)), EnumerateConstraints::default(), &rat_int(2))
            .unwrap_err()
            .to_string();
        assert!(e.contains("area"), "{e}");
    }

    #[test]
    fn enumerate_closed_under_generator_subtraction() {
        let fan = p1xp1();
        let gens = wall_curve_classes(&fan).unwrap();
        let classes =
            enumerate_effective(&fan, EnumerateConstraints::default(), &rat_int(6)).unwrap();
        let set: BTreeSet<&CurveClass> = classes.iter().collect();
        for c in &classes {
            for g in &gens {
                let diff: Vec<i64> = c.0.iter().zip(&g.0).map(|(a, b)| a - b).collect();
                let diff = CurveClass(diff);
                if diff.is_zero() {
                    continue;
                }
                // subtracting a generator leaves the listed set or goes negative
                let area = diff.area(&fan.areas);
                if !area.is_positive() {
                    continue;
                }
                let in_cone = {
                    let others: Vec<&CurveClass> = gens.iter().collect();
                    is_nonneg_combo(&diff, &others)
                };
                if in_cone {
                    assert!(set.contains(&diff), "missing {:?}", diff);
                }
            }
        }
    }

    #[test]
    fn enumerate_by_multiplicity_orders_by_degree() {
        let fan = f2(ones(4));
        let out = enumerate_by_multiplicity(
            &fan,
            EnumerateConstraints {
                c1_equals: Some(0),
                negative_at: Some(1),
            },
            3,
        )
        .unwrap();
        let mults: Vec<Vec<u64>> = out.iter().map(|(m, _)| m.clone()).collect();
        assert_eq!(mults, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        assert_eq!(out[0].1, CurveClass(vec![1, -2, 1, 0]));
    }

    #[test]
    fn c1_and_area_are_additive() {
        let fan = f2(vec![rat_int(1), rat(1, 2), rat_int(1), rat(1, 2)]);
        let gens = wall_curve_classes(&fan).unwrap();
        let sum = CurveClass(
            gens[0]
                .0
                .iter()
                .zip(&gens[1].0)
                .map(|(a, b)| a + b)
                .collect(),
        );
        assert_eq!(sum.c1(), gens[0].c1() + gens[1].c1());
        assert_eq!(
            sum.area(&fan.areas),
            gens[0].area(&fan.areas) + gens[1].area(&fan.areas)
        );
    }

    #[test]
    fn json_round_trip_and_pointer_errors() {
        let fan = p2();
        let j = serde_json::to_string(&fan.to_json_value()).unwrap();
        let back = ToricInput::from_json_str(&j).unwrap();
        assert_eq!(back.rays, fan.rays);
        assert_eq!(back.areas, fan.areas);

        let missing = r#"{"rays": [], "cones": [], "areas": []}"#;
        let e = ToricInput::from_json_str(missing).unwrap_err().to_string();
        assert!(e.contains("/dim"), "{e}");

        let bad_ray = r#"{"dim": 2, "rays": [[1, "x"]], "cones": [], "areas": []}"#;
        let e = ToricInput::from_json_str(bad_ray).unwrap_err().to_string();
        assert!(e.contains("/rays/0/1"), "{e}");

        let bad_area = r#"{"dim": 2, "rays": [[1,0]], "cones": [[0]], "areas": ["1/0"]}"#;
        let e = ToricInput::from_json_str(bad_area).unwrap_err().to_string();
        assert!(e.contains("/areas/0"), "{e}");
    }

    #[test]
    fn user_mori_checked_against_lattice() {
        let bad = p2().with_mori(vec![vec![1, 0, 0]]);
        let e = validate(&bad).unwrap_err().to_string();
        assert!(e.contains("relation lattice"), "{e}");
        let good = p2().with_mori(vec![vec![1, 1, 1]]);
        assert_eq!(
            mori_generators(&good).unwrap(),
            vec![CurveClass(vec![1, 1, 1])]
        );
    }
}

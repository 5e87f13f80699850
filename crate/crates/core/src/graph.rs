//! Levels, cones, paths and frequencies of the rank-d graphs.
//!
//! Every level of the graphs handled here is the same cone
//! `0 <= x1 <= ... <= xd`; the graphs differ only in their incidence
//! relation ([`ConeKind`]). Predicates use exact `<=` on floats. The one
//! tolerant variant, [`check_edge_tolerant`], exists for eigensolver output.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// `true` iff `0 <= x1 <= x2 <= ... <= xd`.
pub fn check_level_membership(coords: &[f64]) -> bool {
    match coords.first() {
        None => false,
        Some(&first) => first >= 0.0 && coords.windows(2).all(|w| w[0] <= w[1]),
    }
}

/// A point of level `level`: a weakly increasing nonnegative d-vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    level: u64,
    coords: Vec<f64>,
}

impl Vertex {
    pub fn new(level: u64, coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(contract("vertex dimension must be at least 1"));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(contract("vertex coordinates must be finite"));
        }
        if !check_level_membership(&coords) {
            return Err(contract(format!(
                "coordinates {coords:?} are not in the cone 0 <= x1 <= ... <= xd"
            )));
        }
        Ok(Self { level, coords })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeKind {
    /// Interlacing: `x1 <= y1 <= x2 <= y2 <= ... <= xd <= yd`.
    GelfandTsetlin,
    /// Coordinatewise containment: `xi <= yi`.
    YoungJumps,
}

impl FromStr for ConeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gt" | "gelfand-tsetlin" => Ok(Self::GelfandTsetlin),
            "young" | "young-jumps" => Ok(Self::YoungJumps),
            other => Err(Error::Parse(format!("unknown cone `{other}` (expected gt|young)"))),
        }
    }
}

fn edge_preconditions(x: &Vertex, y: &Vertex) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(contract(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.level + 1 != y.level {
        return Err(contract(format!(
            "edge must join consecutive levels, got {} -> {}",
            x.level, y.level
        )));
    }
    Ok(())
}

/// Incidence predicate between consecutive levels.
pub fn check_edge(x: &Vertex, y: &Vertex, cone: ConeKind) -> Result<bool> {
    edge_preconditions(x, y)?;
    Ok(edge_holds(&x.coords, &y.coords, cone, 0.0))
}

/// [`check_edge`] with every inequality relaxed by `tol` (absolute).
pub fn check_edge_tolerant(x: &Vertex, y: &Vertex, cone: ConeKind, tol: f64) -> Result<bool> {
    edge_preconditions(x, y)?;
    Ok(edge_holds(&x.coords, &y.coords, cone, tol))
}

pub(crate) fn edge_holds(x: &[f64], y: &[f64], cone: ConeKind, tol: f64) -> bool {
    let lower = x.iter().zip(y).all(|(xi, yi)| *xi <= *yi + tol);
    match cone {
        ConeKind::YoungJumps => lower,
        ConeKind::GelfandTsetlin => {
            lower && x[0] >= -tol && y.iter().zip(&x[1..]).all(|(yi, xn)| *yi <= *xn + tol)
        }
    }
}

/// The frequency parameter of an ergodic central measure.
///
/// Equal entries are allowed; samplers that need distinct frequencies check
/// it themselves. Infinite frequencies are not representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector(Vec<f64>);

impl FrequencyVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(contract("frequency vector must be nonempty"));
        }
        if lambdas.iter().any(|l| l.is_infinite()) {
            return Err(contract(
                "infinite frequency corresponds to the zero measure and cannot be sampled",
            ));
        }
        if lambdas.iter().any(|l| l.is_nan() || *l < 0.0) {
            return Err(contract(format!("frequencies must be finite and >= 0, got {lambdas:?}")));
        }
        if !lambdas.windows(2).all(|w| w[0] <= w[1]) {
            return Err(contract(format!("frequencies must be weakly increasing, got {lambdas:?}")));
        }
        Ok(Self(lambdas))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

impl FromStr for FrequencyVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_list(s)?)
    }
}

/// Comma-separated floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        })
        .collect()
}

/// A finite run of vertices on consecutive levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathWindow {
    start_level: u64,
    vertices: Vec<Vertex>,
}

impl PathWindow {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| contract("path window must contain at least one vertex"))?;
        let (start_level, d) = (first.level, first.dim());
        for (k, v) in vertices.iter().enumerate() {
            if v.level != start_level + k as u64 {
                return Err(contract(format!(
                    "vertex {k} has level {}, expected {}",
                    v.level,
                    start_level + k as u64
                )));
            }
            if v.dim() != d {
                return Err(contract(format!("vertex {k} has dimension {}, expected {d}", v.dim())));
            }
        }
        Ok(Self { start_level, vertices })
    }

    /// Builds a window from raw coordinate rows starting at `start_level`.
    pub fn from_rows(start_level: u64, rows: Vec<Vec<f64>>) -> Result<Self> {
        let vertices = rows
            .into_iter()
            .enumerate()
            .map(|(k, coords)| Vertex::new(start_level + k as u64, coords))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices)
    }

    pub fn start_level(&self) -> u64 {
        self.start_level
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn last(&self) -> &Vertex {
        self.vertices.last().expect("nonempty by construction")
    }

    /// Vertex at absolute level `level`, if the window covers it.
    pub fn at_level(&self, level: u64) -> Option<&Vertex> {
        level
            .checked_sub(self.start_level)
            .and_then(|k| self.vertices.get(k as usize))
    }

    /// Serializes as `level,x1,...,xd` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level");
        for i in 1..=self.dim() {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for v in &self.vertices {
            out.push_str(&v.level.to_string());
            for x in &v.coords {
                let _ = write!(out, ",{}", format_f64(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let d = cols.len().saturating_sub(1);
        let header_ok = cols.first() == Some(&"level")
            && d >= 1
            && cols[1..].iter().enumerate().all(|(i, c)| *c == format!("x{}", i + 1));
        if !header_ok {
            return Err(Error::Parse(format!("bad PathWindow header `{header}`")));
        }
        let mut vertices = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse(format!("expected {} fields in `{line}`", d + 1)));
            }
            let level = fields[0]
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("level `{}`: {e}", fields[0])))?;
            let coords = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("`{f}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            vertices.push(Vertex::new(level, coords)?);
        }
        Self::new(vertices)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x(n) / n` at the last vertex of the window.
pub fn estimate_frequencies(path: &PathWindow) -> Result<FrequencyVector> {
    let last = path.last();
    if last.level == 0 {
        return Err(contract("cannot estimate frequencies at level 0"));
    }
    let n = last.level as f64;
    FrequencyVector::new(last.coords.iter().map(|x| x / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(level: u64, c: &[f64]) -> Vertex {
        Vertex::new(level, c.to_vec()).unwrap()
    }

    #[test]
    fn level_membership_examples() {
        assert!(check_level_membership(&[0.0, 0.0, 0.0]));
        assert!(check_level_membership(&[1.0, 3.0]));
        assert!(!check_level_membership(&[3.0, 1.0]));
        assert!(!check_level_membership(&[-0.1, 2.0]));
    }

    #[test]
    fn edge_examples() {
        let gt = ConeKind::GelfandTsetlin;
        assert!(check_edge(&v(0, &[1.0, 3.0]), &v(1, &[2.0, 4.0]), gt).unwrap());
        assert!(!check_edge(&v(0, &[1.0, 3.0]), &v(1, &[4.0, 5.0]), gt).unwrap());
        assert!(check_edge(&v(0, &[1.0, 3.0]), &v(1, &[2.0, 3.0]), ConeKind::YoungJumps).unwrap());
    }

    #[test]
    fn edge_contract_errors() {
        let gt = ConeKind::GelfandTsetlin;
        assert!(matches!(
            check_edge(&v(0, &[1.0]), &v(1, &[1.0, 2.0]), gt),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            check_edge(&v(0, &[1.0]), &v(2, &[2.0]), gt),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn frequency_estimates() {
        let rows: Vec<Vec<f64>> = (1..=5).map(|n| vec![2.0 * n as f64, 5.0 * n as f64]).collect();
        let path = PathWindow::from_rows(1, rows).unwrap();
        assert_eq!(estimate_frequencies(&path).unwrap().as_slice(), &[2.0, 5.0]);

        let zero = PathWindow::from_rows(3, vec![vec![0.0; 3]; 4]).unwrap();
        assert_eq!(estimate_frequencies(&zero).unwrap().as_slice(), &[0.0; 3]);

        let at_zero = PathWindow::from_rows(0, vec![vec![1.0]]).unwrap();
        assert!(matches!(estimate_frequencies(&at_zero), Err(Error::Contract(_))));
    }

    #[test]
    fn frequency_vector_rejects_infinite_and_unsorted() {
        assert!(FrequencyVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(FrequencyVector::new(vec![3.0, 1.0]).is_err());
        assert!(FrequencyVector::new(vec![-1.0]).is_err());
        assert!(FrequencyVector::new(vec![1.0, 1.0]).is_ok());
        assert_eq!("1,3".parse::<FrequencyVector>().unwrap().as_slice(), &[1.0, 3.0]);
    }

    #[test]
    fn window_rejects_gaps_and_mixed_dimensions() {
        assert!(PathWindow::new(vec![v(1, &[1.0]), v(3, &[2.0])]).is_err());
        assert!(PathWindow::new(vec![v(1, &[1.0]), v(2, &[1.0, 2.0])]).is_err());
        assert!(PathWindow::new(vec![]).is_err());
    }

    #[test]
    fn csv_header_and_parse_errors() {
        let p = PathWindow::from_rows(2, vec![vec![0.5, 1.0], vec![0.75, 2.0]]).unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("level,x1,x2\n2,"));
        assert!(PathWindow::from_csv("lvl,x1\n0,1\n").is_err());
        assert!(PathWindow::from_csv("level,x1\n0,1,2\n").is_err());
    }

    fn sorted_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1e6, d).prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            v
        })
    }

    proptest! {
        #[test]
        fn interlacing_implies_containment(x in sorted_vec(4), y in sorted_vec(4)) {
            let (a, b) = (v(0, &x), v(1, &y));
            if check_edge(&a, &b, ConeKind::GelfandTsetlin).unwrap() {
                prop_assert!(check_edge(&a, &b, ConeKind::YoungJumps).unwrap());
            }
        }

        #[test]
        fn upward_shift_is_a_young_edge(x in sorted_vec(3), t in 0.0f64..1e3) {
            let y: Vec<f64> = x.iter().map(|xi| xi + t).collect();
            prop_assert!(check_edge(&v(4, &x), &v(5, &y), ConeKind::YoungJumps).unwrap());
        }

        #[test]
        fn frequency_estimate_is_homogeneous(x in sorted_vec(3), level in 1u64..1000, c in 0.01f64..100.0) {
            let p = PathWindow::from_rows(level, vec![x.clone()]).unwrap();
            let scaled = PathWindow::from_rows(level, vec![x.iter().map(|xi| xi * c).collect()]).unwrap();
            let a = estimate_frequencies(&p).unwrap();
            let b = estimate_frequencies(&scaled).unwrap();
            for (ai, bi) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((ai * c - bi).abs() <= 1e-12 * bi.abs().max(1e-300));
            }
        }

        #[test]
        fn csv_round_trip_is_exact(rows in prop::collection::vec(sorted_vec(3), 1..8), start in 0u64..100) {
            let p = PathWindow::from_rows(start, rows).unwrap();
            prop_assert_eq!(PathWindow::from_csv(&p.to_csv()).unwrap(), p);
        }
    }
}

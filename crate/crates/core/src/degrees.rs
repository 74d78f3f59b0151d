//! Joint per-class in/out degree distributions.
//!
//! A node's degree is the pair of vectors `(j, k)` where `j[i]` counts its
//! incoming and `k[i]` its outgoing edges of class `i`. Distributions are
//! sparse tables over these pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::TypedDigraph;
use crate::{Error, Real, Result, MAX_CLASSES};

/// Entries lighter than this after thinning are dropped.
pub const PRUNE_BELOW: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DegreeVector {
    pub in_by_class: Vec<u32>,
    pub out_by_class: Vec<u32>,
}

impl DegreeVector {
    pub fn new(in_by_class: Vec<u32>, out_by_class: Vec<u32>) -> Self {
        DegreeVector { in_by_class, out_by_class }
    }

    pub fn zero(n_classes: usize) -> Self {
        DegreeVector { in_by_class: vec![0; n_classes], out_by_class: vec![0; n_classes] }
    }

    pub fn n_classes(&self) -> usize {
        self.in_by_class.len()
    }

    /// In/out blocks exchanged, i.e. the degree seen in the reversed graph.
    pub fn swapped(&self) -> Self {
        DegreeVector { in_by_class: self.out_by_class.clone(), out_by_class: self.in_by_class.clone() }
    }
}

/// Mean degree per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats<T> {
    pub z_by_class: Vec<T>,
}

impl<T: Real> DegreeStats<T> {
    pub fn n_classes(&self) -> usize {
        self.z_by_class.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDegreeDistribution<T> {
    n_classes: usize,
    table: BTreeMap<DegreeVector, T>,
}

pub(crate) fn check_classes(n_classes: usize) -> Result<()> {
    if n_classes == 0 || n_classes > MAX_CLASSES {
        return Err(Error::domain(format!("number of classes must be in 1..={MAX_CLASSES}, got {n_classes}")));
    }
    Ok(())
}

pub(crate) fn check_probabilities<T: Real>(p: &[T], n_classes: usize) -> Result<()> {
    if p.len() != n_classes {
        return Err(Error::domain(format!(
            "expected {n_classes} occupation probabilities, got {}",
            p.len()
        )));
    }
    for (i, &pi) in p.iter().enumerate() {
        if !(pi >= T::zero() && pi <= T::one()) {
            return Err(Error::domain(format!("occupation probability p[{i}] = {pi} is outside [0, 1]")));
        }
    }
    Ok(())
}

impl<T: Real> JointDegreeDistribution<T> {
    /// Builds a distribution from (degree, probability) pairs. Duplicate keys
    /// are merged. The total must be within 1e-9 of one; it is then
    /// renormalised exactly.
    pub fn new(n_classes: usize, entries: impl IntoIterator<Item = (DegreeVector, T)>) -> Result<Self> {
        check_classes(n_classes)?;
        let mut table = BTreeMap::new();
        for (d, p) in entries {
            if d.in_by_class.len() != n_classes || d.out_by_class.len() != n_classes {
                return Err(Error::domain(format!("degree vector {d:?} does not have {n_classes} classes")));
            }
            if !(p.is_finite() && p >= T::zero()) {
                return Err(Error::domain(format!("probability {p} for {d:?} is not a finite nonnegative number")));
            }
            if p > T::zero() {
                *table.entry(d).or_insert_with(T::zero) += p;
            }
        }
        let total: T = table.values().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        let mut dist = JointDegreeDistribution { n_classes, table };
        dist.normalize();
        Ok(dist)
    }

    pub fn point_mass(d: DegreeVector) -> Result<Self> {
        let n = d.n_classes();
        Self::new(n, [(d, T::one())])
    }

    /// Relative frequency of each node's degree vector in `g`.
    pub fn empirical(g: &TypedDigraph) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::domain("a graph without nodes has no degree distribution"));
        }
        let c = g.n_classes();
        let mut per_node = vec![DegreeVector::zero(c); n];
        for e in g.edges() {
            per_node[e.src].out_by_class[e.class.index()] += 1;
            per_node[e.dst].in_by_class[e.class.index()] += 1;
        }
        let mut counts: BTreeMap<DegreeVector, usize> = BTreeMap::new();
        for d in per_node {
            *counts.entry(d).or_default() += 1;
        }
        let total = T::from_usize(n).expect("node count fits the scalar type");
        let table = counts
            .into_iter()
            .map(|(d, k)| (d, T::from_usize(k).expect("count fits the scalar type") / total))
            .collect();
        Ok(JointDegreeDistribution { n_classes: c, table })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DegreeVector, T)> + '_ {
        self.table.iter().map(|(d, &p)| (d, p))
    }

    pub fn get(&self, d: &DegreeVector) -> T {
        self.table.get(d).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.table.values().copied().sum()
    }

    fn normalize(&mut self) {
        let total = self.total();
        if total > T::zero() && total != T::one() {
            for p in self.table.values_mut() {
                *p /= total;
            }
        }
    }

    /// Degree law after each class-`i` edge independently survives with
    /// probability `p[i]`: every in- and out-count is binomially thinned.
    pub fn thin(&self, p: &[T]) -> Result<Self> {
        check_probabilities(p, self.n_classes)?;
        let c = self.n_classes;
        // binomial pmf rows per class, indexed [count][kept]
        let rows: Vec<Vec<Vec<T>>> = (0..c)
            .map(|i| {
                let max_deg = self
                    .table
                    .keys()
                    .map(|d| d.in_by_class[i].max(d.out_by_class[i]))
                    .max()
                    .unwrap_or(0);
                binomial_rows(max_deg as usize, p[i])
            })
            .collect();

        let mut out: BTreeMap<DegreeVector, T> = BTreeMap::new();
        for (d0, &mass) in &self.table {
            // odometer over the componentwise downset of d0
            let limits: Vec<u32> = d0.in_by_class.iter().chain(&d0.out_by_class).copied().collect();
            let mut cur = vec![0u32; 2 * c];
            loop {
                let mut w = mass;
                for (slot, &kept) in cur.iter().enumerate() {
                    let class = slot % c;
                    w *= rows[class][limits[slot] as usize][kept as usize];
                }
                if w > T::zero() {
                    let key = DegreeVector::new(cur[..c].to_vec(), cur[c..].to_vec());
                    *out.entry(key).or_insert_with(T::zero) += w;
                }
                let mut slot = 0;
                while slot < cur.len() {
                    if cur[slot] < limits[slot] {
                        cur[slot] += 1;
                        break;
                    }
                    cur[slot] = 0;
                    slot += 1;
                }
                if slot == cur.len() {
                    break;
                }
            }
        }
        let floor = T::lit(PRUNE_BELOW);
        out.retain(|_, w| *w >= floor);
        let mut dist = JointDegreeDistribution { n_classes: c, table: out };
        dist.normalize();
        Ok(dist)
    }

    /// Mean in-degree per class.
    pub fn stats(&self) -> DegreeStats<T> {
        self.means(|d, i| d.in_by_class[i])
    }

    /// Mean out-degree per class.
    pub fn out_stats(&self) -> DegreeStats<T> {
        self.means(|d, i| d.out_by_class[i])
    }

    fn means(&self, pick: impl Fn(&DegreeVector, usize) -> u32) -> DegreeStats<T> {
        let z_by_class = (0..self.n_classes)
            .map(|i| self.table.iter().map(|(d, &p)| p * T::from_u32(pick(d, i)).unwrap()).sum())
            .collect();
        DegreeStats { z_by_class }
    }

    /// Checks that mean in- and out-degree agree per class, as they must for
    /// any distribution realisable by a graph.
    pub fn check_balanced(&self, tol: T) -> Result<()> {
        let zin = self.stats();
        let zout = self.out_stats();
        for i in 0..self.n_classes {
            let (a, b) = (zin.z_by_class[i], zout.z_by_class[i]);
            if (a - b).abs() > tol {
                return Err(Error::domain(format!(
                    "class {i}: mean in-degree {a} differs from mean out-degree {b}"
                )));
            }
        }
        Ok(())
    }

    /// In/out blocks of every entry exchanged.
    pub fn swapped(&self) -> Self {
        JointDegreeDistribution {
            n_classes: self.n_classes,
            table: self.table.iter().map(|(d, &p)| (d.swapped(), p)).collect(),
        }
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            classes: self.n_classes,
            entries: self
                .table
                .iter()
                .map(|(d, &p)| DistributionEntry {
                    in_degrees: d.in_by_class.clone(),
                    out_degrees: d.out_by_class.clone(),
                    p: p.as_f64(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &DistributionFile) -> Result<Self> {
        let entries = file
            .entries
            .iter()
            .map(|e| {
                let p = T::from_f64(e.p).ok_or_else(|| Error::domain(format!("probability {} not representable", e.p)))?;
                Ok((DegreeVector::new(e.in_degrees.clone(), e.out_degrees.clone()), p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.classes, entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("distribution serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Serialised form: `{"classes": n, "entries": [{"in": [..], "out": [..], "p": x}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub classes: usize,
    pub entries: Vec<DistributionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionEntry {
    #[serde(rename = "in")]
    pub in_degrees: Vec<u32>,
    #[serde(rename = "out")]
    pub out_degrees: Vec<u32>,
    pub p: f64,
}

/// `rows[n][k] = C(n, k) p^k (1-p)^(n-k)` for `n <= max_n`.
fn binomial_rows<T: Real>(max_n: usize, p: T) -> Vec<Vec<T>> {
    let q = T::one() - p;
    let mut pascal: Vec<T> = vec![T::one()];
    let mut rows = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        if n > 0 {
            let mut next = vec![T::one(); n + 1];
            for k in 1..n {
                next[k] = pascal[k - 1] + pascal[k];
            }
            pascal = next;
        }
        let row = (0..=n)
            .map(|k| pascal[k] * p.powi(k as i32) * q.powi((n - k) as i32))
            .collect();
        rows.push(row);
    }
    rows
}

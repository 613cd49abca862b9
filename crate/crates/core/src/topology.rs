//! Finite topological spaces given by an explicit list of open sets.
//!
//! A validated topology owns a canonical open list (ordered by size, then
//! lexicographically on sorted point names) and every downstream structure
//! refers to opens by their stable index in that list.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Default cap on the number of points; exhaustive checks over opens are
/// exponential, so desk-scale spaces only.
pub const DEFAULT_MAX_POINTS: usize = 16;

/// Opens are stored as bitmasks, which bounds the point count for good.
pub const ABSOLUTE_MAX_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("point set must be nonempty")]
    NoPoints,
    #[error("duplicate point identifier `{0}`")]
    DuplicatePoint(String),
    #[error("{count} points exceed the maximum of {max}")]
    TooManyPoints { count: usize, max: usize },
    #[error("open set #{open} refers to unknown point `{point}`")]
    UnknownOpenPoint { open: usize, point: String },
    #[error("the empty set or the full point set is missing from the opens")]
    MissingEmptyOrFull,
    #[error("opens not closed under union: {left} ∪ {right} is not an open")]
    NotClosedUnderUnion { left: String, right: String },
    #[error("opens not closed under intersection: {left} ∩ {right} is not an open")]
    NotClosedUnderIntersection { left: String, right: String },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("open sets belong to different topologies")]
    DifferentTopologies,
    #[error("open index {index} out of range ({count} opens)")]
    BadOpenIndex { index: usize, count: usize },
}

/// Stable index of an open set in the canonical open list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenId(pub usize);

impl fmt::Display for OpenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.0)
    }
}

/// A validated finite topological space. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    points: Vec<String>,
    opens: Vec<u64>,
    index: BTreeMap<u64, OpenId>,
    digest: u64,
}

fn fnv1a(digest: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *digest ^= b as u64;
        *digest = digest.wrapping_mul(0x100000001b3);
    }
}

impl FiniteTopology {
    /// Validates a candidate topology with the default point cap.
    pub fn new(points: Vec<String>, opens: Vec<Vec<String>>) -> Result<Self, TopologyError> {
        Self::with_max_points(points, opens, DEFAULT_MAX_POINTS)
    }

    /// Validates a candidate topology. Opens are deduplicated and stored in
    /// canonical order (by size, then lexicographically on point names).
    pub fn with_max_points(
        points: Vec<String>,
        opens: Vec<Vec<String>>,
        max_points: usize,
    ) -> Result<Self, TopologyError> {
        if points.is_empty() {
            return Err(TopologyError::NoPoints);
        }
        let max = max_points.min(ABSOLUTE_MAX_POINTS);
        if points.len() > max {
            return Err(TopologyError::TooManyPoints {
                count: points.len(),
                max,
            });
        }
        let mut sorted = points;
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(TopologyError::DuplicatePoint(w[0].clone()));
            }
        }
        let point_index: BTreeMap<&str, usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();

        let mut mask_set = BTreeSet::new();
        for (oi, open) in opens.iter().enumerate() {
            let mut mask = 0u64;
            for p in open {
                let Some(&i) = point_index.get(p.as_str()) else {
                    return Err(TopologyError::UnknownOpenPoint {
                        open: oi,
                        point: p.clone(),
                    });
                };
                mask |= 1 << i;
            }
            mask_set.insert(mask);
        }

        let full = if sorted.len() == 64 {
            u64::MAX
        } else {
            (1u64 << sorted.len()) - 1
        };
        if !mask_set.contains(&0) || !mask_set.contains(&full) {
            return Err(TopologyError::MissingEmptyOrFull);
        }

        let masks: Vec<u64> = mask_set.iter().copied().collect();
        let describe = |mask: u64| -> String { format_mask(mask, &sorted) };
        for (ai, &a) in masks.iter().enumerate() {
            for &b in &masks[ai + 1..] {
                if !mask_set.contains(&(a | b)) {
                    return Err(TopologyError::NotClosedUnderUnion {
                        left: describe(a),
                        right: describe(b),
                    });
                }
                if !mask_set.contains(&(a & b)) {
                    return Err(TopologyError::NotClosedUnderIntersection {
                        left: describe(a),
                        right: describe(b),
                    });
                }
            }
        }

        let mut canonical: Vec<u64> = masks;
        canonical.sort_by_key(|&m| (m.count_ones(), bit_indices(m)));
        let index = canonical
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, OpenId(i)))
            .collect();

        let mut digest = 0xcbf29ce484222325u64;
        for p in &sorted {
            fnv1a(&mut digest, p.as_bytes());
            fnv1a(&mut digest, b";");
        }
        for &m in &canonical {
            fnv1a(&mut digest, &m.to_le_bytes());
        }

        Ok(FiniteTopology {
            points: sorted,
            opens: canonical,
            index,
            digest,
        })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn open_count(&self) -> usize {
        self.opens.len()
    }

    pub fn open_ids(&self) -> impl Iterator<Item = OpenId> + '_ {
        (0..self.opens.len()).map(OpenId)
    }

    /// Content fingerprint; equal topologies compare equal regardless of
    /// where they were built.
    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn check_open(&self, id: OpenId) -> Result<(), TopologyError> {
        if id.0 < self.opens.len() {
            Ok(())
        } else {
            Err(TopologyError::BadOpenIndex {
                index: id.0,
                count: self.opens.len(),
            })
        }
    }

    pub fn open(&self, id: OpenId) -> OpenSet<'_> {
        debug_assert!(id.0 < self.opens.len());
        OpenSet { topology: self, id }
    }

    pub(crate) fn mask(&self, id: OpenId) -> u64 {
        self.opens[id.0]
    }

    pub fn open_size(&self, id: OpenId) -> usize {
        self.mask(id).count_ones() as usize
    }

    /// Member point indices of an open, ascending.
    pub fn open_point_indices(&self, id: OpenId) -> Vec<usize> {
        bit_indices(self.mask(id))
    }

    pub fn open_members(&self, id: OpenId) -> Vec<&str> {
        self.open_point_indices(id)
            .into_iter()
            .map(|i| self.points[i].as_str())
            .collect()
    }

    pub fn format_open(&self, id: OpenId) -> String {
        format_mask(self.mask(id), &self.points)
    }

    pub fn empty_open(&self) -> OpenId {
        OpenId(0)
    }

    pub fn full_open(&self) -> OpenId {
        OpenId(self.opens.len() - 1)
    }

    pub fn find_open(&self, members: &[&str]) -> Option<OpenId> {
        let mut mask = 0u64;
        for p in members {
            mask |= 1 << self.point_index(p)?;
        }
        self.index.get(&mask).copied()
    }

    pub fn is_subset(&self, v: OpenId, u: OpenId) -> bool {
        self.mask(v) & !self.mask(u) == 0
    }

    /// Union of two opens; present by closure.
    pub fn union(&self, a: OpenId, b: OpenId) -> OpenId {
        self.index[&(self.mask(a) | self.mask(b))]
    }

    /// Intersection of two opens; present by closure.
    pub fn intersection(&self, a: OpenId, b: OpenId) -> OpenId {
        self.index[&(self.mask(a) & self.mask(b))]
    }

    /// The hom-set of the inclusion poset: the unique inclusion when
    /// v ⊆ w, empty otherwise.
    pub fn hom_set(&self, v: OpenId, w: OpenId) -> Option<Inclusion> {
        if self.is_subset(v, w) {
            Some(Inclusion { source: v, target: w })
        } else {
            None
        }
    }

    /// The minimal open neighbourhood U_x: intersection of all opens
    /// containing x. Open by finite intersection closure.
    pub fn minimal_open(&self, point: &str) -> Result<OpenId, TopologyError> {
        let i = self
            .point_index(point)
            .ok_or_else(|| TopologyError::UnknownPoint(point.to_string()))?;
        let bit = 1u64 << i;
        let mut acc = self.opens[self.opens.len() - 1];
        for &m in &self.opens {
            if m & bit != 0 {
                acc &= m;
            }
        }
        Ok(self.index[&acc])
    }

    /// Cover of `u` by the minimal opens of its points, deduplicated and in
    /// canonical order.
    pub fn minimal_open_cover(&self, u: OpenId) -> Cover {
        let mut parts = BTreeSet::new();
        for i in self.open_point_indices(u) {
            let point = self.points[i].clone();
            let id = self
                .minimal_open(&point)
                .expect("point of a validated open");
            parts.insert(id);
        }
        Cover {
            covered: u,
            parts: parts.into_iter().collect(),
        }
    }

    /// All inclusion pairs (v, u) with v ⊆ u, including v = u.
    pub fn inclusion_pairs(&self) -> Vec<(OpenId, OpenId)> {
        let mut pairs = Vec::new();
        for u in self.open_ids() {
            for v in self.open_ids() {
                if self.is_subset(v, u) {
                    pairs.push((v, u));
                }
            }
        }
        pairs
    }

    /// Covering relations of the inclusion poset: (v, u) with v ⊂ u strict
    /// and no open strictly between.
    pub fn hasse_edges(&self) -> Vec<(OpenId, OpenId)> {
        let mut edges = Vec::new();
        for u in self.open_ids() {
            for v in self.open_ids() {
                if v == u || !self.is_subset(v, u) {
                    continue;
                }
                let between = self.open_ids().any(|w| {
                    w != v && w != u && self.is_subset(v, w) && self.is_subset(w, u)
                });
                if !between {
                    edges.push((v, u));
                }
            }
        }
        edges
    }
}

fn bit_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

fn format_mask(mask: u64, points: &[String]) -> String {
    let names: Vec<&str> = bit_indices(mask)
        .into_iter()
        .map(|i| points[i].as_str())
        .collect();
    format!("{{{}}}", names.join(", "))
}

/// Borrowed view of one open set of a topology.
#[derive(Clone, Copy)]
pub struct OpenSet<'t> {
    topology: &'t FiniteTopology,
    id: OpenId,
}

impl<'t> OpenSet<'t> {
    pub fn id(&self) -> OpenId {
        self.id
    }

    pub fn topology(&self) -> &'t FiniteTopology {
        self.topology
    }

    pub fn members(&self) -> Vec<&'t str> {
        self.topology
            .open_point_indices(self.id)
            .into_iter()
            .map(|i| self.topology.points()[i].as_str())
            .collect()
    }

    pub fn size(&self) -> usize {
        self.topology.open_size(self.id)
    }

    pub fn contains(&self, point: &str) -> bool {
        self.topology
            .point_index(point)
            .map(|i| self.topology.mask(self.id) & (1 << i) != 0)
            .unwrap_or(false)
    }
}

impl fmt::Debug for OpenSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.topology.format_open(self.id))
    }
}

/// Inclusion morphism between two opens of one topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inclusion {
    pub source: OpenId,
    pub target: OpenId,
}

impl Inclusion {
    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }
}

/// Hom-set between opens that may come from distinct topology values;
/// rejects mixed arguments instead of silently comparing indices.
pub fn hom_set<'t>(v: &OpenSet<'t>, w: &OpenSet<'t>) -> Result<Option<Inclusion>, TopologyError> {
    if v.topology.digest() != w.topology.digest() {
        return Err(TopologyError::DifferentTopologies);
    }
    Ok(v.topology.hom_set(v.id, w.id))
}

/// An open cover: parts are opens whose union should equal `covered`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub covered: OpenId,
    pub parts: Vec<OpenId>,
}

/// Report-style result of a cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    /// Points of `covered` hit by no part.
    pub uncovered: Vec<String>,
    /// Parts that are not subsets of `covered`.
    pub overflowing_parts: Vec<OpenId>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty() && self.overflowing_parts.is_empty()
    }
}

/// Confirms that the parts are contained in `covered` and their union
/// equals it, or reports the witnesses.
pub fn check_cover(topology: &FiniteTopology, cover: &Cover) -> CoverReport {
    let covered_mask = topology.mask(cover.covered);
    let mut union = 0u64;
    let mut overflowing = Vec::new();
    for &p in &cover.parts {
        let m = topology.mask(p);
        if m & !covered_mask != 0 {
            overflowing.push(p);
        }
        union |= m;
    }
    let uncovered = bit_indices(covered_mask & !union)
        .into_iter()
        .map(|i| topology.points()[i].to_string())
        .collect();
    CoverReport {
        uncovered,
        overflowing_parts: overflowing,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn strs(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn opens(sets: &[&[&str]]) -> Vec<Vec<String>> {
        sets.iter().map(|s| strs(s)).collect()
    }

    pub(crate) fn sierpinski() -> FiniteTopology {
        FiniteTopology::new(strs(&["a", "b"]), opens(&[&[], &["a"], &["a", "b"]])).unwrap()
    }

    pub(crate) fn discrete2() -> FiniteTopology {
        FiniteTopology::new(strs(&["a", "b"]), opens(&[&[], &["a"], &["b"], &["a", "b"]]))
            .unwrap()
    }

    pub(crate) fn pseudocircle() -> FiniteTopology {
        FiniteTopology::new(
            strs(&["a", "b", "c", "d"]),
            opens(&[
                &[],
                &["a"],
                &["b"],
                &["a", "b"],
                &["a", "b", "c"],
                &["a", "b", "d"],
                &["a", "b", "c", "d"],
            ]),
        )
        .unwrap()
    }

    #[test]
    fn discrete_two_point_is_valid() {
        let t = discrete2();
        assert_eq!(t.open_count(), 4);
        assert_eq!(t.format_open(t.full_open()), "{a, b}");
    }

    #[test]
    fn sierpinski_is_valid() {
        let t = sierpinski();
        assert_eq!(t.open_count(), 3);
    }

    #[test]
    fn union_closure_violation_reports_witness() {
        let err = FiniteTopology::new(
            strs(&["a", "b", "c"]),
            opens(&[&[], &["a"], &["b"], &["a", "b", "c"]]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            TopologyError::NotClosedUnderUnion {
                left: "{a}".to_string(),
                right: "{b}".to_string()
            }
        );
    }

    #[test]
    fn intersection_closure_violation_reports_witness() {
        let err = FiniteTopology::new(
            strs(&["a", "b", "c"]),
            opens(&[&[], &["a", "b"], &["b", "c"], &["a", "b", "c"]]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            TopologyError::NotClosedUnderIntersection {
                left: "{a, b}".to_string(),
                right: "{b, c}".to_string()
            }
        );
    }

    #[test]
    fn missing_full_set_rejected() {
        let err = FiniteTopology::new(strs(&["a", "b"]), opens(&[&[], &["a"]])).unwrap_err();
        assert_eq!(err, TopologyError::MissingEmptyOrFull);
    }

    #[test]
    fn point_cap_enforced() {
        let pts: Vec<String> = (0..5).map(|i| format!("p{i}")).collect();
        let all: Vec<String> = pts.clone();
        let err =
            FiniteTopology::with_max_points(pts, vec![vec![], all], 4).unwrap_err();
        assert!(matches!(err, TopologyError::TooManyPoints { count: 5, max: 4 }));
    }

    #[test]
    fn canonical_order_is_size_then_lex() {
        let t = pseudocircle();
        let rendered: Vec<String> =
            t.open_ids().map(|id| t.format_open(id)).collect();
        assert_eq!(
            rendered,
            vec![
                "{}",
                "{a}",
                "{b}",
                "{a, b}",
                "{a, b, c}",
                "{a, b, d}",
                "{a, b, c, d}"
            ]
        );
    }

    #[test]
    fn hom_set_cases() {
        let t = sierpinski();
        let a = t.find_open(&["a"]).unwrap();
        let x = t.full_open();
        let inc = t.hom_set(a, x).unwrap();
        assert_eq!(inc, Inclusion { source: a, target: x });
        assert!(t.hom_set(a, a).unwrap().is_identity());
        assert!(t.hom_set(x, a).is_none());
    }

    #[test]
    fn hom_set_rejects_mixed_topologies() {
        let s = sierpinski();
        let d = discrete2();
        let v = s.open(s.full_open());
        let w = d.open(d.full_open());
        assert_eq!(hom_set(&v, &w), Err(TopologyError::DifferentTopologies));
    }

    #[test]
    fn hom_set_is_a_partial_order() {
        let t = pseudocircle();
        for u in t.open_ids() {
            for v in t.open_ids() {
                for w in t.open_ids() {
                    if t.hom_set(u, v).is_some() && t.hom_set(v, w).is_some() {
                        assert!(t.hom_set(u, w).is_some(), "transitivity");
                    }
                }
                if t.hom_set(u, v).is_some() && t.hom_set(v, u).is_some() {
                    assert_eq!(u, v, "antisymmetry");
                }
            }
        }
    }

    #[test]
    fn minimal_opens() {
        let s = sierpinski();
        assert_eq!(s.minimal_open("a").unwrap(), s.find_open(&["a"]).unwrap());
        assert_eq!(s.minimal_open("b").unwrap(), s.full_open());

        let d = discrete2();
        assert_eq!(d.minimal_open("a").unwrap(), d.find_open(&["a"]).unwrap());

        let p = pseudocircle();
        // Independent enumeration: intersect all opens containing c.
        let mut expected = p.mask(p.full_open());
        for id in p.open_ids() {
            if p.open(id).contains("c") {
                expected &= p.mask(id);
            }
        }
        let got = p.minimal_open("c").unwrap();
        assert_eq!(p.mask(got), expected);
        assert_eq!(p.format_open(got), "{a, b, c}");
        assert!(matches!(
            p.minimal_open("z"),
            Err(TopologyError::UnknownPoint(_))
        ));
    }

    #[test]
    fn minimal_open_is_contained_in_every_neighbourhood() {
        let t = pseudocircle();
        for point in t.points().to_vec() {
            let ux = t.minimal_open(&point).unwrap();
            for v in t.open_ids() {
                if t.open(v).contains(&point) {
                    assert!(t.is_subset(ux, v));
                }
            }
        }
    }

    #[test]
    fn closure_is_exhaustively_verified() {
        let t = pseudocircle();
        for a in t.open_ids() {
            for b in t.open_ids() {
                // union / intersection lookups panic if closure failed
                let _ = t.union(a, b);
                let _ = t.intersection(a, b);
            }
        }
    }

    #[test]
    fn cover_checks() {
        let d = discrete2();
        let good = Cover {
            covered: d.full_open(),
            parts: vec![d.find_open(&["a"]).unwrap(), d.find_open(&["b"]).unwrap()],
        };
        assert!(check_cover(&d, &good).is_valid());

        let short = Cover {
            covered: d.full_open(),
            parts: vec![d.find_open(&["a"]).unwrap()],
        };
        let report = check_cover(&d, &short);
        assert_eq!(report.uncovered, vec!["b".to_string()]);

        let p = pseudocircle();
        let two = Cover {
            covered: p.full_open(),
            parts: vec![
                p.find_open(&["a", "b", "c"]).unwrap(),
                p.find_open(&["a", "b", "d"]).unwrap(),
            ],
        };
        assert!(check_cover(&p, &two).is_valid());
    }

    #[test]
    fn minimal_open_covers() {
        let s = sierpinski();
        let c = s.minimal_open_cover(s.full_open());
        assert_eq!(
            c.parts,
            vec![s.find_open(&["a"]).unwrap(), s.full_open()]
        );
        assert!(check_cover(&s, &c).is_valid());

        let d = discrete2();
        let c = d.minimal_open_cover(d.full_open());
        assert_eq!(c.parts.len(), 2);
        assert!(check_cover(&d, &c).is_valid());

        let p = pseudocircle();
        let c = p.minimal_open_cover(p.full_open());
        let rendered: Vec<String> = c.parts.iter().map(|&id| p.format_open(id)).collect();
        assert_eq!(rendered, vec!["{a}", "{b}", "{a, b, c}", "{a, b, d}"]);
        assert!(check_cover(&p, &c).is_valid());

        // The empty open is covered by zero parts.
        let c = p.minimal_open_cover(p.empty_open());
        assert!(c.parts.is_empty());
        assert!(check_cover(&p, &c).is_valid());
    }

    #[test]
    fn hasse_edges_of_sierpinski() {
        let s = sierpinski();
        let a = s.find_open(&["a"]).unwrap();
        assert_eq!(
            s.hasse_edges(),
            vec![(s.empty_open(), a), (a, s.full_open())]
        );
    }
}

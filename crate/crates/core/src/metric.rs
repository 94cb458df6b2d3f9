//! Exact extended distances, finite metric spaces and finite function spaces.
//!
//! Every distance is an integer count of grid units or `ExtReal::Infinite`.
//! Functions between finite carriers are stored as index tables and
//! enumerated in lexicographic order: the first domain element is the most
//! significant digit.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitOrAssign, Not};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Upper bound on the number of functions in an enumerated function space.
pub const MAX_FUNCTIONS: usize = 1 << 24;

/// Non-negative extended real measured in grid units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtReal {
    Finite(u64),
    Infinite,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0);
    pub const INFINITY: ExtReal = ExtReal::Infinite;

    pub fn units(n: u64) -> Self {
        ExtReal::Finite(n)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtReal::Finite(n) => Some(n),
            ExtReal::Infinite => None,
        }
    }

    /// Doubles the value, saturating at infinity.
    pub fn double(self) -> Self {
        ext_add(self, self)
    }
}

/// Saturating sum; infinity absorbs.
pub fn ext_add(a: ExtReal, b: ExtReal) -> ExtReal {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => {
            x.checked_add(y).map_or(ExtReal::Infinite, ExtReal::Finite)
        }
        _ => ExtReal::Infinite,
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ext_add(self, rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(n) => write!(f, "{n}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(ExtReal::Infinite);
        }
        s.parse::<u64>()
            .map(ExtReal::Finite)
            .map_err(|_| Error::invalid(format!("not a grid value: {s:?}")))
    }
}

/// Subset of a finite carrier of at most 64 elements, as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= 64);
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element of `self \ other`.
    pub fn first_outside(self, other: Subset) -> Option<usize> {
        let diff = self.0 & !other.0;
        (diff != 0).then(|| diff.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitOrAssign for Subset {
    fn bitor_assign(&mut self, rhs: Subset) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl Not for Subset {
    type Output = Subset;
    fn not(self) -> Subset {
        Subset(!self.0)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Subset::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

/// Which metric axiom failed, with the offending carrier labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricViolation {
    Identity { x: String, y: String },
    Symmetry { x: String, y: String },
    Triangle { x: String, y: String, z: String },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::Identity { x, y } => write!(f, "identity of indiscernibles at ({x},{y})"),
            MetricViolation::Symmetry { x, y } => write!(f, "symmetry at ({x},{y})"),
            MetricViolation::Triangle { x, y, z } => write!(f, "triangle inequality at ({x},{y},{z})"),
        }
    }
}

/// Finite carrier with a full distance table and an optional numeric order.
///
/// `levels`, when present, assigns each element its utility in grid units;
/// argmax-style selection functions compare those.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMetricSpace {
    labels: Vec<String>,
    dist: Vec<ExtReal>,
    levels: Option<Vec<u64>>,
}

impl FinMetricSpace {
    /// Builds a space and checks every metric axiom.
    pub fn new(labels: Vec<String>, dist: Vec<ExtReal>, levels: Option<Vec<u64>>) -> Result<Self> {
        let space = Self::unchecked(labels, dist, levels)?;
        validate_metric(&space)?.map_err(Error::Metric)?;
        Ok(space)
    }

    /// Checks shapes and labels but not the metric axioms.
    pub fn unchecked(labels: Vec<String>, dist: Vec<ExtReal>, levels: Option<Vec<u64>>) -> Result<Self> {
        let n = labels.len();
        if n > 64 {
            return Err(Error::TooLarge(format!("carrier of {n} elements (limit 64)")));
        }
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch { size: n, expected: n * n, found: dist.len() });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate carrier label {l:?}")));
            }
        }
        if let Some(lv) = &levels {
            if lv.len() != n {
                return Err(Error::invalid(format!("{} levels for {n} carrier elements", lv.len())));
            }
            for (i, v) in lv.iter().enumerate() {
                if lv[..i].contains(v) {
                    return Err(Error::invalid(format!("duplicate level {v}; order must be total")));
                }
            }
        }
        Ok(FinMetricSpace { labels, dist, levels })
    }

    /// The interval `{0, 1, ..., top}` with absolute-difference distance.
    pub fn grid(top: u64) -> Self {
        let n = top as usize + 1;
        let labels = (0..n).map(|i| i.to_string()).collect();
        let dist = (0..n)
            .flat_map(|i| (0..n).map(move |j| ExtReal::Finite(i.abs_diff(j) as u64)))
            .collect();
        FinMetricSpace { labels, dist, levels: Some((0..=top).collect()) }
    }

    /// Discrete metric: every distinct pair at distance one.
    pub fn discrete<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let dist = (0..n)
            .flat_map(|i| (0..n).map(move |j| ExtReal::Finite(u64::from(i != j))))
            .collect();
        Self::unchecked(labels, dist, None)
    }

    /// The one-point space.
    pub fn unit() -> Self {
        FinMetricSpace { labels: vec!["*".into()], dist: vec![ExtReal::ZERO], levels: None }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dist(&self, i: usize, j: usize) -> ExtReal {
        self.dist[i * self.len() + j]
    }

    pub fn table(&self) -> &[ExtReal] {
        &self.dist
    }

    pub fn levels(&self) -> Option<&[u64]> {
        self.levels.as_deref()
    }

    pub fn is_grid(&self) -> Option<u64> {
        let top = self.len().checked_sub(1)? as u64;
        (*self == Self::grid(top)).then_some(top)
    }

    pub fn is_discrete(&self) -> bool {
        self.levels.is_none()
            && (0..self.len())
                .all(|i| (0..self.len()).all(|j| self.dist(i, j) == ExtReal::Finite(u64::from(i != j))))
    }

    /// Largest distance in the table (zero for spaces of size at most one).
    pub fn diameter(&self) -> ExtReal {
        self.dist.iter().copied().max().unwrap_or(ExtReal::ZERO)
    }

    /// Sorted distinct distances occurring in the table, always including 0.
    pub fn realized_distances(&self) -> Vec<ExtReal> {
        let mut ds: Vec<ExtReal> = self.dist.clone();
        ds.push(ExtReal::ZERO);
        ds.sort();
        ds.dedup();
        ds
    }

    /// `{ w : d(v, w) <= eps }` in carrier order.
    pub fn ball(&self, v: usize, eps: ExtReal) -> Vec<usize> {
        (0..self.len()).filter(|&w| self.dist(v, w) <= eps).collect()
    }

    pub(crate) fn balls(&self, eps: ExtReal) -> Vec<Vec<usize>> {
        (0..self.len()).map(|v| self.ball(v, eps)).collect()
    }
}

/// Checks the three axioms. `Ok(Err(_))` carries the first violation:
/// identity and symmetry are scanned over pairs first, then the triangle
/// inequality over triples `(x, y, z)` meaning `d(x,z) <= d(x,y) + d(y,z)`.
pub fn validate_metric(space: &FinMetricSpace) -> Result<Result<(), MetricViolation>> {
    let n = space.len();
    if space.dist.len() != n * n {
        return Err(Error::DimensionMismatch { size: n, expected: n * n, found: space.dist.len() });
    }
    let l = |i: usize| space.label(i).to_string();
    for x in 0..n {
        for y in 0..n {
            if (space.dist(x, y) == ExtReal::ZERO) != (x == y) {
                return Ok(Err(MetricViolation::Identity { x: l(x), y: l(y) }));
            }
            if space.dist(x, y) != space.dist(y, x) {
                return Ok(Err(MetricViolation::Symmetry { x: l(x), y: l(y) }));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if space.dist(x, z) > space.dist(x, y) + space.dist(y, z) {
                    return Ok(Err(MetricViolation::Triangle { x: l(x), y: l(y), z: l(z) }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Cartesian product in lexicographic order with the max distance.
/// Element `(i, j)` sits at index `i * |right| + j`.
pub fn tensor_metric(left: &FinMetricSpace, right: &FinMetricSpace) -> FinMetricSpace {
    let (n, m) = (left.len(), right.len());
    let labels = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| format!("({},{})", left.label(i), right.label(j)))
        .collect();
    let mut dist = Vec::with_capacity(n * m * n * m);
    for i in 0..n {
        for j in 0..m {
            for i2 in 0..n {
                for j2 in 0..m {
                    dist.push(left.dist(i, i2).max(right.dist(j, j2)));
                }
            }
        }
    }
    FinMetricSpace { labels, dist, levels: None }
}

/// The set of functions from a `domain`-element carrier to a
/// `codomain`-element carrier, indexed lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FnSpace {
    pub domain: usize,
    pub codomain: usize,
}

impl FnSpace {
    pub fn new(domain: usize, codomain: usize) -> Result<Self> {
        let space = FnSpace { domain, codomain };
        space.checked_count()?;
        Ok(space)
    }

    fn checked_count(&self) -> Result<usize> {
        u32::try_from(self.domain)
            .ok()
            .and_then(|d| self.codomain.checked_pow(d))
            .filter(|&c| c <= MAX_FUNCTIONS)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "{}^{} utility functions (limit {MAX_FUNCTIONS})",
                    self.codomain, self.domain
                ))
            })
    }

    /// Number of functions; validated at construction.
    pub fn count(&self) -> usize {
        self.codomain.pow(self.domain as u32)
    }

    pub fn stride(&self, i: usize) -> usize {
        self.codomain.pow((self.domain - 1 - i) as u32)
    }

    pub fn digit(&self, index: usize, i: usize) -> usize {
        index / self.stride(i) % self.codomain
    }

    pub fn encode(&self, entries: &[usize]) -> usize {
        entries.iter().fold(0, |acc, &e| acc * self.codomain + e)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.domain];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.codomain;
            rest /= self.codomain;
        }
        out
    }

    pub fn table(&self, index: usize) -> FnTable {
        FnTable { entries: self.decode(index), codomain: self.codomain }
    }

    pub fn tables(&self) -> impl Iterator<Item = FnTable> + '_ {
        (0..self.count()).map(|i| self.table(i))
    }
}

/// Total function between finite carriers, as codomain indices in domain order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnTable {
    entries: Vec<usize>,
    codomain: usize,
}

impl FnTable {
    pub fn new(entries: Vec<usize>, codomain: usize) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e >= codomain) {
            return Err(Error::Membership(format!("image index {bad} (codomain has {codomain} elements)")));
        }
        Ok(FnTable { entries, codomain })
    }

    pub fn constant(domain: usize, value: usize, codomain: usize) -> Result<Self> {
        Self::new(vec![value; domain], codomain)
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn get(&self, x: usize) -> usize {
        self.entries[x]
    }

    pub fn domain_len(&self) -> usize {
        self.entries.len()
    }

    pub fn codomain_len(&self) -> usize {
        self.codomain
    }

    pub fn space(&self) -> FnSpace {
        FnSpace { domain: self.entries.len(), codomain: self.codomain }
    }

    /// Position in the lexicographic enumeration of its function space.
    pub fn index(&self) -> usize {
        self.space().encode(&self.entries)
    }
}

impl fmt::Display for FnTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// Sup-metric: the largest pointwise codomain distance.
pub fn sup_metric(f: &FnTable, g: &FnTable, codomain: &FinMetricSpace) -> Result<ExtReal> {
    if f.domain_len() != g.domain_len() || f.codomain != g.codomain {
        return Err(Error::DomainMismatch(format!(
            "{} -> {} vs {} -> {}",
            f.domain_len(),
            f.codomain,
            g.domain_len(),
            g.codomain
        )));
    }
    if f.codomain != codomain.len() {
        return Err(Error::DomainMismatch(format!(
            "tables map into {} elements but the codomain space has {}",
            f.codomain,
            codomain.len()
        )));
    }
    Ok(f.entries
        .iter()
        .zip(&g.entries)
        .map(|(&a, &b)| codomain.dist(a, b))
        .max()
        .unwrap_or(ExtReal::ZERO))
}

/// All tables within sup-distance `eps` of `f`, in lexicographic order.
pub fn within_ball(f: &FnTable, eps: ExtReal, codomain: &FinMetricSpace) -> Vec<FnTable> {
    let candidates: Vec<Vec<usize>> = f.entries.iter().map(|&v| codomain.ball(v, eps)).collect();
    let mut out = Vec::new();
    let mut cursor = vec![0usize; candidates.len()];
    loop {
        out.push(FnTable {
            entries: cursor.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect(),
            codomain: f.codomain,
        });
        // odometer, last position fastest
        let mut pos = candidates.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < candidates[pos].len() {
                break;
            }
            cursor[pos] = 0;
        }
    }
}

/// For a table indexed by functions of `space`, replaces every entry by the
/// union of the entries over its sup-ball. `balls[v]` is the codomain ball
/// around `v`. The sup-ball is the product of per-coordinate balls, so the
/// union is taken one coordinate at a time.
pub(crate) fn ball_union(table: &[Subset], space: FnSpace, balls: &[Vec<usize>]) -> Vec<Subset> {
    debug_assert_eq!(table.len(), space.count());
    let mut cur = table.to_vec();
    let mut next = vec![Subset::EMPTY; cur.len()];
    let m = space.codomain;
    for axis in 0..space.domain {
        let stride = space.stride(axis);
        if balls.iter().all(|b| b.len() == 1) {
            break;
        }
        for (idx, slot) in next.iter_mut().enumerate() {
            let digit = idx / stride % m;
            let base = idx - digit * stride;
            let mut acc = Subset::EMPTY;
            for &w in &balls[digit] {
                acc |= cur[base + w * stride];
            }
            *slot = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(labels: &[&str], rows: &[&[u64]]) -> FinMetricSpace {
        let dist = rows.iter().flat_map(|r| r.iter().map(|&d| ExtReal::Finite(d))).collect();
        FinMetricSpace::unchecked(labels.iter().map(|s| s.to_string()).collect(), dist, None).unwrap()
    }

    #[test]
    fn ext_add_examples() {
        assert_eq!(ext_add(ExtReal::ZERO, ExtReal::ZERO), ExtReal::ZERO);
        assert_eq!(ext_add(ExtReal::units(2), ExtReal::units(3)), ExtReal::units(5));
        assert_eq!(ext_add(ExtReal::units(7), ExtReal::INFINITY), ExtReal::INFINITY);
        assert_eq!(ext_add(ExtReal::units(u64::MAX), ExtReal::units(1)), ExtReal::INFINITY);
        assert!(ExtReal::units(1_000_000) < ExtReal::INFINITY);
    }

    #[test]
    fn ext_real_parses() {
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::INFINITY);
        assert_eq!(" 4 ".parse::<ExtReal>().unwrap(), ExtReal::units(4));
        assert!("-1".parse::<ExtReal>().is_err());
        assert!("1.5".parse::<ExtReal>().is_err());
    }

    #[test]
    fn validate_examples() {
        let discrete = FinMetricSpace::discrete(["a", "b"]).unwrap();
        assert_eq!(validate_metric(&discrete).unwrap(), Ok(()));

        let asym = space(&["a", "b"], &[&[0, 1], &[2, 0]]);
        assert_eq!(
            validate_metric(&asym).unwrap(),
            Err(MetricViolation::Symmetry { x: "a".into(), y: "b".into() })
        );

        let tri = space(&["a", "b", "c"], &[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]);
        assert_eq!(
            validate_metric(&tri).unwrap(),
            Err(MetricViolation::Triangle { x: "a".into(), y: "b".into(), z: "c".into() })
        );

        let collapsed = space(&["a", "b"], &[&[0, 0], &[0, 0]]);
        assert!(matches!(validate_metric(&collapsed).unwrap(), Err(MetricViolation::Identity { .. })));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = FinMetricSpace::unchecked(vec!["a".into(), "b".into()], vec![ExtReal::ZERO; 3], None);
        assert!(matches!(err, Err(Error::DimensionMismatch { size: 2, expected: 4, found: 3 })));
    }

    #[test]
    fn infinite_distances_are_allowed() {
        let s = FinMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![ExtReal::ZERO, ExtReal::INFINITY, ExtReal::INFINITY, ExtReal::ZERO],
            None,
        )
        .unwrap();
        assert_eq!(s.diameter(), ExtReal::INFINITY);
        assert_eq!(s.realized_distances(), vec![ExtReal::ZERO, ExtReal::INFINITY]);
    }

    #[test]
    fn tensor_examples() {
        let ab = FinMetricSpace::discrete(["a", "b"]).unwrap();
        let cd = FinMetricSpace::discrete(["c", "d"]).unwrap();
        let p = tensor_metric(&ab, &cd);
        let (ac, bd) = (p.index_of("(a,c)").unwrap(), p.index_of("(b,d)").unwrap());
        assert_eq!(p.dist(ac, bd), ExtReal::units(1));

        let g = FinMetricSpace::grid(2);
        let gg = tensor_metric(&g, &g);
        let (p02, p11) = (gg.index_of("(0,2)").unwrap(), gg.index_of("(1,1)").unwrap());
        assert_eq!(gg.dist(p02, p11), ExtReal::units(1));
        for i in 0..gg.len() {
            assert_eq!(gg.dist(i, i), ExtReal::ZERO);
        }
        assert_eq!(validate_metric(&gg).unwrap(), Ok(()));
    }

    #[test]
    fn sup_metric_examples() {
        let g2 = FinMetricSpace::grid(2);
        let f = FnTable::new(vec![0, 2], 3).unwrap();
        let g = FnTable::new(vec![1, 1], 3).unwrap();
        assert_eq!(sup_metric(&f, &g, &g2).unwrap(), ExtReal::units(1));
        assert_eq!(sup_metric(&f, &f, &g2).unwrap(), ExtReal::ZERO);

        let g3 = FinMetricSpace::grid(3);
        let f = FnTable::new(vec![0], 4).unwrap();
        let g = FnTable::new(vec![3], 4).unwrap();
        assert_eq!(sup_metric(&f, &g, &g3).unwrap(), ExtReal::units(3));

        let short = FnTable::new(vec![0], 4).unwrap();
        let long = FnTable::new(vec![0, 0], 4).unwrap();
        assert!(matches!(sup_metric(&short, &long, &g3), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn within_ball_examples() {
        let g2 = FinMetricSpace::grid(2);
        let f = FnTable::new(vec![1], 3).unwrap();
        let ball: Vec<Vec<usize>> =
            within_ball(&f, ExtReal::units(1), &g2).iter().map(|t| t.entries().to_vec()).collect();
        assert_eq!(ball, vec![vec![0], vec![1], vec![2]]);

        let f = FnTable::new(vec![2, 0], 3).unwrap();
        assert_eq!(within_ball(&f, ExtReal::ZERO, &g2), vec![f.clone()]);
    }

    #[test]
    fn within_ball_matches_brute_force_filter() {
        let g1 = FinMetricSpace::grid(1);
        let f = FnTable::new(vec![0, 0], 2).unwrap();
        let space = f.space();
        let oracle: Vec<FnTable> = space
            .tables()
            .filter(|g| sup_metric(&f, g, &g1).unwrap() <= ExtReal::units(1))
            .collect();
        assert_eq!(oracle.len(), 4);
        assert_eq!(within_ball(&f, ExtReal::units(1), &g1), oracle);
    }

    #[test]
    fn fn_space_round_trip_and_order() {
        let s = FnSpace::new(3, 4).unwrap();
        assert_eq!(s.count(), 64);
        for i in 0..s.count() {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.decode(1), vec![0, 0, 1]);
        assert_eq!(s.digit(s.encode(&[2, 3, 1]), 1), 3);
        assert!(FnSpace::new(64, 4).is_err());
    }

    #[test]
    fn ball_union_matches_ball_enumeration() {
        let g2 = FinMetricSpace::grid(2);
        let space = FnSpace::new(2, 3).unwrap();
        let table: Vec<Subset> = (0..space.count()).map(|i| Subset((i as u64 * 7 + 3) % 4)).collect();
        for eps in [ExtReal::ZERO, ExtReal::units(1), ExtReal::units(2)] {
            let fast = ball_union(&table, space, &g2.balls(eps));
            for (i, got) in fast.iter().enumerate() {
                let naive = within_ball(&space.table(i), eps, &g2)
                    .iter()
                    .fold(Subset::EMPTY, |acc, k| acc | table[k.index()]);
                assert_eq!(*got, naive);
            }
        }
    }

    #[test]
    fn subset_ops() {
        let s: Subset = [0, 2].into_iter().collect();
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.first_outside(Subset::singleton(0)), Some(2));
        assert!(Subset::singleton(2).is_subset(s));
        assert_eq!(Subset::full(3).len(), 3);
    }
}

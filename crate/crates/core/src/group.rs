//! Discrete groups used as index sets for kernels.
//!
//! Four families are supported: the free abelian groups `Z^d`, the discrete
//! Heisenberg group `H3(Z)`, the cyclic groups `Z/n` and the finite
//! Heisenberg groups `H3(Z/p)`. All of them are unimodular and carry counting
//! measure, so no modular-function factors appear anywhere in the crate.
//!
//! Heisenberg elements are triples `(a, b, c)` with the law
//!
//! ```text
//! (a, b, c) · (a', b', c') = (a + a', b + b', c + c' + a·b')
//! ```
//!
//! Word lengths are taken with respect to the standard symmetric generating
//! sets: `±e_i` for `Z^d`, `±1` for `Z/n` and `(±1,0,0), (0,±1,0)` for both
//! Heisenberg kinds.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Upper bound on BFS radius for word-length queries on infinite
/// non-abelian groups.
const MAX_BFS_RADIUS: u32 = 64;

/// A group element, stored as an integer coordinate tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupPoint(SmallVec<[i64; 3]>);

impl GroupPoint {
    pub fn new(coords: &[i64]) -> Self {
        GroupPoint(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl From<&[i64]> for GroupPoint {
    fn from(c: &[i64]) -> Self {
        GroupPoint::new(c)
    }
}

impl<const N: usize> From<[i64; N]> for GroupPoint {
    fn from(c: [i64; N]) -> Self {
        GroupPoint::new(&c)
    }
}

/// The family a group belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `Z^d`, `d >= 1`.
    Zd(usize),
    /// `H3(Z)`.
    DiscreteHeisenberg,
    /// `Z/n`, `n >= 1`.
    CyclicZmod(u64),
    /// `H3(Z/p)`, `p` prime.
    FiniteHeisenbergModP(u64),
}

/// Memoized breadth-first layers of the Cayley graph.
#[derive(Default)]
struct BfsCache {
    lengths: HashMap<GroupPoint, u32>,
    frontier: Vec<GroupPoint>,
    radius: u32,
    complete: bool,
}

/// A discrete group together with its standard generating set.
///
/// Cloning is cheap; clones share the word-length memo.
#[derive(Clone)]
pub struct Group {
    kind: GroupKind,
    generators: Vec<GroupPoint>,
    cache: Arc<Mutex<BfsCache>>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Zd(d) => write!(f, "Z^{d}"),
            GroupKind::DiscreteHeisenberg => write!(f, "H3(Z)"),
            GroupKind::CyclicZmod(n) => write!(f, "Z/{n}"),
            GroupKind::FiniteHeisenbergModP(p) => write!(f, "H3(Z/{p})"),
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognized group descriptor {s:?}"));
        if s == "Z" {
            return Group::new(GroupKind::Zd(1));
        }
        if s == "H3(Z)" {
            return Group::new(GroupKind::DiscreteHeisenberg);
        }
        if let Some(rest) = s.strip_prefix("Z^") {
            let d = rest.parse::<usize>().map_err(|_| bad())?;
            return Group::new(GroupKind::Zd(d));
        }
        if let Some(rest) = s.strip_prefix("H3(Z/").and_then(|r| r.strip_suffix(')')) {
            let p = rest.parse::<u64>().map_err(|_| bad())?;
            return Group::new(GroupKind::FiniteHeisenbergModP(p));
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            let n = rest.parse::<u64>().map_err(|_| bad())?;
            return Group::new(GroupKind::CyclicZmod(n));
        }
        Err(bad())
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

impl Group {
    pub fn new(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Zd(0) => return Err(Error::InvalidGroup("Z^d needs d >= 1".into())),
            GroupKind::CyclicZmod(0) => return Err(Error::InvalidGroup("Z/n needs n >= 1".into())),
            GroupKind::FiniteHeisenbergModP(p) if !is_prime(p) => {
                return Err(Error::InvalidGroup(format!("H3(Z/p) needs p prime, got {p}")))
            }
            _ => {}
        }
        let mut g = Group {
            kind,
            generators: Vec::new(),
            cache: Arc::new(Mutex::new(BfsCache::default())),
        };
        g.generators = g.standard_generators();
        Ok(g)
    }

    /// `Z^d`.
    pub fn zd(d: usize) -> Self {
        Group::new(GroupKind::Zd(d)).expect("dimension must be positive")
    }

    /// `Z/n`.
    pub fn cyclic(n: u64) -> Self {
        Group::new(GroupKind::CyclicZmod(n)).expect("order must be positive")
    }

    /// `H3(Z)`.
    pub fn heisenberg() -> Self {
        Group::new(GroupKind::DiscreteHeisenberg).unwrap()
    }

    /// `H3(Z/p)`.
    pub fn heisenberg_mod(p: u64) -> Self {
        Group::new(GroupKind::FiniteHeisenbergModP(p)).expect("p must be prime")
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generators(&self) -> &[GroupPoint] {
        &self.generators
    }

    /// Number of coordinates of a point.
    pub fn arity(&self) -> usize {
        match self.kind {
            GroupKind::Zd(d) => d,
            GroupKind::DiscreteHeisenberg | GroupKind::FiniteHeisenbergModP(_) => 3,
            GroupKind::CyclicZmod(_) => 1,
        }
    }

    /// Group order, `None` for infinite groups.
    pub fn order(&self) -> Option<usize> {
        match self.kind {
            GroupKind::CyclicZmod(n) => Some(n as usize),
            GroupKind::FiniteHeisenbergModP(p) => Some((p * p * p) as usize),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    fn modulus(&self) -> Option<i64> {
        match self.kind {
            GroupKind::CyclicZmod(n) => Some(n as i64),
            GroupKind::FiniteHeisenbergModP(p) => Some(p as i64),
            _ => None,
        }
    }

    fn reduce(&self, mut coords: SmallVec<[i64; 3]>) -> GroupPoint {
        if let Some(m) = self.modulus() {
            for c in coords.iter_mut() {
                *c = c.rem_euclid(m);
            }
        }
        GroupPoint(coords)
    }

    fn standard_generators(&self) -> Vec<GroupPoint> {
        let mut gens = BTreeSet::new();
        let n = self.arity();
        let axes: &[usize] = match self.kind {
            GroupKind::DiscreteHeisenberg | GroupKind::FiniteHeisenbergModP(_) => &[0, 1],
            _ => &[],
        };
        let axes: Vec<usize> = if axes.is_empty() {
            (0..n).collect()
        } else {
            axes.to_vec()
        };
        for &i in &axes {
            for sign in [-1i64, 1] {
                let mut c: SmallVec<[i64; 3]> = SmallVec::from_elem(0, n);
                c[i] = sign;
                gens.insert(self.reduce(c));
            }
        }
        let e = self.identity();
        gens.into_iter().filter(|g| *g != e).collect()
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint(SmallVec::from_elem(0, self.arity()))
    }

    /// Checks that `x` has the right arity and is in canonical range.
    pub fn check(&self, x: &GroupPoint) -> Result<()> {
        if x.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: x.len(),
            });
        }
        if let Some(m) = self.modulus() {
            if x.coords().iter().any(|&c| c < 0 || c >= m) {
                return Err(Error::InvalidPoint(format!("{x:?} not reduced modulo {m}")));
            }
        }
        Ok(())
    }

    /// Reduces arbitrary integer coordinates into a valid point.
    pub fn point(&self, coords: &[i64]) -> Result<GroupPoint> {
        if coords.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: coords.len(),
            });
        }
        Ok(self.reduce(SmallVec::from_slice(coords)))
    }

    /// Group law. Errors on arity mismatch.
    pub fn multiply(&self, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Inverse. Errors on arity mismatch.
    pub fn inverse(&self, x: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        Ok(self.inv(x))
    }

    /// Unchecked group law, for points already known to be valid.
    pub fn mul(&self, x: &GroupPoint, y: &GroupPoint) -> GroupPoint {
        let (a, b) = (x.coords(), y.coords());
        let c: SmallVec<[i64; 3]> = match self.kind {
            GroupKind::Zd(_) | GroupKind::CyclicZmod(_) => a.iter().zip(b).map(|(u, v)| u + v).collect(),
            GroupKind::DiscreteHeisenberg | GroupKind::FiniteHeisenbergModP(_) => {
                smallvec::smallvec![a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]
            }
        };
        self.reduce(c)
    }

    /// Unchecked inverse.
    pub fn inv(&self, x: &GroupPoint) -> GroupPoint {
        let a = x.coords();
        let c: SmallVec<[i64; 3]> = match self.kind {
            GroupKind::Zd(_) | GroupKind::CyclicZmod(_) => a.iter().map(|u| -u).collect(),
            GroupKind::DiscreteHeisenberg | GroupKind::FiniteHeisenbergModP(_) => {
                smallvec::smallvec![-a[0], -a[1], a[0] * a[1] - a[2]]
            }
        };
        self.reduce(c)
    }

    /// `x · y⁻¹`.
    pub fn div(&self, x: &GroupPoint, y: &GroupPoint) -> GroupPoint {
        self.mul(x, &self.inv(y))
    }

    /// Every element of a finite group, in coordinate order.
    pub fn elements(&self) -> Option<Vec<GroupPoint>> {
        let m = self.modulus()?;
        let n = self.arity();
        let total = self.order()?;
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total as i64 {
            let mut c: SmallVec<[i64; 3]> = SmallVec::from_elem(0, n);
            for slot in c.iter_mut().rev() {
                *slot = idx % m;
                idx /= m;
            }
            out.push(GroupPoint(c));
        }
        Some(out)
    }

    /// Position of `x` in [`Group::elements`].
    pub fn index_of(&self, x: &GroupPoint) -> Option<usize> {
        let m = self.modulus()?;
        Some(x.coords().iter().fold(0i64, |acc, &c| acc * m + c) as usize)
    }

    /// Word length with respect to the standard generators.
    ///
    /// Closed forms are used for the abelian kinds; the Heisenberg kinds go
    /// through a memoized breadth-first search.
    pub fn word_length(&self, x: &GroupPoint) -> u32 {
        match self.kind {
            GroupKind::Zd(_) => x.coords().iter().map(|c| c.unsigned_abs() as u32).sum(),
            GroupKind::CyclicZmod(n) => {
                let k = x.coords()[0].rem_euclid(n as i64) as u64;
                k.min(n - k) as u32
            }
            _ => self.bfs_length(x),
        }
    }

    fn bfs_length(&self, x: &GroupPoint) -> u32 {
        let mut cache = self.cache.lock().unwrap();
        if cache.lengths.is_empty() {
            let e = self.identity();
            cache.lengths.insert(e.clone(), 0);
            cache.frontier = vec![e];
        }
        loop {
            if let Some(&l) = cache.lengths.get(x) {
                return l;
            }
            assert!(!cache.complete, "element {x:?} unreachable in finite group {self}");
            assert!(
                cache.radius < MAX_BFS_RADIUS,
                "word length of {x:?} exceeds BFS limit {MAX_BFS_RADIUS}"
            );
            self.grow(&mut cache);
        }
    }

    fn grow(&self, cache: &mut BfsCache) {
        let next_r = cache.radius + 1;
        let mut next = Vec::new();
        let frontier = std::mem::take(&mut cache.frontier);
        for p in &frontier {
            for g in &self.generators {
                let q = self.mul(p, g);
                if !cache.lengths.contains_key(&q) {
                    cache.lengths.insert(q.clone(), next_r);
                    next.push(q);
                }
            }
        }
        cache.complete = next.is_empty();
        cache.frontier = next;
        cache.radius = next_r;
    }

    /// All elements of word length at most `radius`, sorted by length and
    /// then lexicographically by coordinates.
    pub fn ball(&self, radius: u32) -> Vec<GroupPoint> {
        let mut pts: Vec<(u32, GroupPoint)> = match self.kind {
            GroupKind::Zd(d) => {
                let mut out = Vec::new();
                let mut cur: SmallVec<[i64; 3]> = SmallVec::from_elem(0, d);
                zd_ball(&mut cur, 0, radius as i64, &mut out);
                out.into_iter().map(|p| (self.word_length(&p), p)).collect()
            }
            _ if self.is_finite() => self
                .elements()
                .unwrap()
                .into_iter()
                .map(|p| (self.word_length(&p), p))
                .filter(|(l, _)| *l <= radius)
                .collect(),
            _ => {
                let mut cache = self.cache.lock().unwrap();
                if cache.lengths.is_empty() {
                    let e = self.identity();
                    cache.lengths.insert(e.clone(), 0);
                    cache.frontier = vec![e];
                }
                while cache.radius < radius && !cache.complete {
                    self.grow(&mut cache);
                }
                cache
                    .lengths
                    .iter()
                    .filter(|(_, &l)| l <= radius)
                    .map(|(p, &l)| (l, p.clone()))
                    .collect()
            }
        };
        pts.sort();
        pts.into_iter().map(|(_, p)| p).collect()
    }
}

fn zd_ball(cur: &mut SmallVec<[i64; 3]>, i: usize, budget: i64, out: &mut Vec<GroupPoint>) {
    if i == cur.len() {
        out.push(GroupPoint(cur.clone()));
        return;
    }
    for v in -budget..=budget {
        cur[i] = v;
        zd_ball(cur, i + 1, budget - v.abs(), out);
    }
    cur[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> GroupPoint {
        GroupPoint::new(c)
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(Group::zd(2).multiply(&p(&[1, 2]), &p(&[3, 4])).unwrap(), p(&[4, 6]));
        let h = Group::heisenberg();
        assert_eq!(h.multiply(&p(&[1, 0, 0]), &p(&[0, 1, 0])).unwrap(), p(&[1, 1, 1]));
        assert_eq!(h.multiply(&p(&[0, 1, 0]), &p(&[1, 0, 0])).unwrap(), p(&[1, 1, 0]));
        assert_eq!(Group::cyclic(5).multiply(&p(&[3]), &p(&[4])).unwrap(), p(&[2]));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let g = Group::zd(2);
        assert!(matches!(
            g.multiply(&p(&[1]), &p(&[1, 2])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(g.inverse(&p(&[1, 2, 3])).is_err());
        assert!(Group::cyclic(5).check(&p(&[7])).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Group::zd(2).inverse(&p(&[1, -3])).unwrap(), p(&[-1, 3]));
        assert_eq!(Group::cyclic(5).inverse(&p(&[2])).unwrap(), p(&[3]));
        let h = Group::heisenberg();
        for (a, b, c) in [(2, 3, 5), (-1, 4, 0), (0, 0, 7)] {
            // (−a, −b, ab − c), solved by hand from the group law
            assert_eq!(h.inverse(&p(&[a, b, c])).unwrap(), p(&[-a, -b, a * b - c]));
        }
    }

    #[test]
    fn word_length_examples() {
        assert_eq!(Group::zd(2).word_length(&p(&[2, -1])), 3);
        let h = Group::heisenberg();
        assert_eq!(h.word_length(&p(&[0, 0, 1])), 4);
        assert_eq!(h.word_length(&h.identity()), 0);
        assert_eq!(Group::cyclic(7).word_length(&p(&[5])), 2);
        let hp = Group::heisenberg_mod(3);
        assert_eq!(hp.word_length(&hp.identity()), 0);
        assert_eq!(hp.word_length(&p(&[0, 0, 1])), 4);
    }

    #[test]
    fn ball_examples() {
        let z = Group::zd(1);
        assert_eq!(z.ball(2), vec![p(&[0]), p(&[-1]), p(&[1]), p(&[-2]), p(&[2])]);
        assert_eq!(Group::zd(2).ball(1).len(), 5);
        // 1 + 4 generators + 12 distinct two-letter words (ab ≠ ba)
        assert_eq!(Group::heisenberg().ball(2).len(), 17);
        assert_eq!(Group::cyclic(5).ball(10).len(), 5);
        assert_eq!(Group::heisenberg_mod(3).ball(100).len(), 27);
    }

    #[test]
    fn heisenberg_ball_matches_plain_bfs() {
        let h = Group::heisenberg();
        let mut seen = BTreeSet::from([h.identity()]);
        let mut layer = vec![h.identity()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for x in &layer {
                for g in h.generators() {
                    let y = h.mul(x, g);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        let ball: BTreeSet<_> = h.ball(3).into_iter().collect();
        assert_eq!(ball, seen);
    }

    #[test]
    fn finite_groups_enumerate_exactly() {
        for g in [Group::cyclic(6), Group::heisenberg_mod(3), Group::heisenberg_mod(5)] {
            let els = g.elements().unwrap();
            assert_eq!(els.len(), g.order().unwrap());
            let distinct: BTreeSet<_> = els.iter().cloned().collect();
            assert_eq!(distinct.len(), els.len());
            for (i, x) in els.iter().enumerate() {
                assert_eq!(g.index_of(x), Some(i));
            }
        }
    }

    #[test]
    fn finite_group_axioms_exhaustive() {
        for g in [Group::cyclic(6), Group::heisenberg_mod(3)] {
            let els = g.elements().unwrap();
            let e = g.identity();
            for x in &els {
                assert_eq!(g.mul(&e, x), *x);
                assert_eq!(g.mul(x, &e), *x);
                assert_eq!(g.mul(x, &g.inv(x)), e);
                for y in &els {
                    for z in &els {
                        assert_eq!(g.mul(&g.mul(x, y), z), g.mul(x, &g.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn descriptor_strings_round_trip() {
        for s in ["Z^2", "H3(Z)", "Z/5", "H3(Z/3)", "Z^1"] {
            let g: Group = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("Z".parse::<Group>().unwrap(), Group::zd(1));
        assert!("H3(Z/4)".parse::<Group>().is_err());
        assert!("Z^0".parse::<Group>().is_err());
        assert!("SL2(Z)".parse::<Group>().is_err());
    }
}

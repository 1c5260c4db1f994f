//! Words in the three involutions, orbit search over Q, and point
//! censuses over finite fields.
//!
//! The involutions generate a group; its elements are reduced words
//! over the alphabet {1, 2, 3} with no adjacent repeats (each letter is
//! an involution). Orbit search is a breadth-first closure with exact
//! canonical-point deduplication: either the orbit closes within the
//! point budget (and the closure is re-verified), or the search stops
//! with the frontier it reached. Over F_p the whole surface is
//! enumerated fiber by fiber and partitioned into orbits with a
//! union-find; points whose fiber lies on the surface are quarantined
//! rather than aborting the census.

use crate::wehler::{sigma_q, FpSurface, SurfacePointFp, SurfacePointQ, WehlerError, WehlerSurface};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Error for malformed group words.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    /// Letters must come from {1, 2, 3} with no adjacent repeats.
    #[error("not a reduced word over {{1, 2, 3}}")]
    UnreducedWord,
}

/// A reduced word in the involutions: letters from {1, 2, 3}, no two
/// adjacent letters equal. The word (i_n, ..., i_1) denotes the
/// composition sigma_{i_n} o ... o sigma_{i_1}, rightmost applied
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GroupWord {
    letters: Vec<u8>,
}

impl GroupWord {
    pub fn new(letters: Vec<u8>) -> Result<Self, WordError> {
        for (n, &l) in letters.iter().enumerate() {
            if !(1..=3).contains(&l) {
                return Err(WordError::UnreducedWord);
            }
            if n > 0 && letters[n - 1] == l {
                return Err(WordError::UnreducedWord);
            }
        }
        Ok(GroupWord { letters })
    }

    pub fn identity() -> Self {
        GroupWord { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Inverse word: letters reversed (every letter is an involution).
    pub fn inverse(&self) -> Self {
        GroupWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    /// Composition self o other (other applied first), reduced at the
    /// seam by cancelling equal adjacent letters.
    pub fn compose(&self, other: &GroupWord) -> Self {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    /// self composed with itself n times.
    pub fn repeat(&self, n: u32) -> Self {
        let mut out = GroupWord::identity();
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    /// Apply the word to a point over Q, rightmost letter first.
    pub fn apply_q(
        &self,
        s: &WehlerSurface,
        pt: &SurfacePointQ,
    ) -> Result<SurfacePointQ, WehlerError> {
        let mut cur = pt.clone();
        for &l in self.letters.iter().rev() {
            cur = sigma_q(s, l, &cur)?;
        }
        Ok(cur)
    }

    /// Apply the word to a point over F_p, rightmost letter first.
    pub fn apply_fp(
        &self,
        s: &FpSurface,
        pt: &SurfacePointFp,
    ) -> Result<SurfacePointFp, WehlerError> {
        let mut cur = *pt;
        for &l in self.letters.iter().rev() {
            cur = s.sigma(l, &cur)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| format!("s{l}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let letters = Vec::<u8>::deserialize(d)?;
        GroupWord::new(letters).map_err(serde::de::Error::custom)
    }
}

/// Outcome of a breadth-first orbit search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OrbitResult {
    /// The full orbit, canonically sorted, verified closed under all
    /// three involutions.
    Finite(Vec<SurfacePointQ>),
    /// The search passed the budget; `visited` distinct points were
    /// found and `frontier` holds the unexpanded boundary.
    BudgetExceeded {
        visited: usize,
        frontier: Vec<SurfacePointQ>,
    },
}

/// Breadth-first orbit closure of `start` under the three involutions,
/// with exact deduplication. Stops once more than `budget` distinct
/// points have been seen. A `Finite` result is re-verified closed
/// before it is returned.
pub fn orbit_closure(
    s: &WehlerSurface,
    start: &SurfacePointQ,
    budget: usize,
) -> Result<OrbitResult, WehlerError> {
    assert!(budget >= 1, "budget must be at least 1");
    let mut visited: BTreeSet<SurfacePointQ> = BTreeSet::new();
    visited.insert(start.clone());
    // The mask records which involutions produced a point. Applying one
    // of them again returns its already-visited parent through the same
    // nondegenerate fiber, so those axes are skipped without changing
    // the visited sequence or the error behaviour.
    let mut frontier: Vec<(SurfacePointQ, u8)> = vec![(start.clone(), 0)];
    while !frontier.is_empty() {
        if visited.len() > budget {
            return Ok(OrbitResult::BudgetExceeded {
                visited: visited.len(),
                frontier: frontier.into_iter().map(|(p, _)| p).collect(),
            });
        }
        let mut next: BTreeMap<SurfacePointQ, u8> = BTreeMap::new();
        for (pt, arrived) in &frontier {
            for axis in 1..=3u8 {
                if arrived & (1 << axis) != 0 {
                    continue;
                }
                let img = sigma_q(s, axis, pt)?;
                if !visited.contains(&img) {
                    *next.entry(img).or_insert(0) |= 1 << axis;
                }
            }
            if visited.len() + next.len() > budget {
                break;
            }
        }
        visited.extend(next.keys().cloned());
        frontier = next.into_iter().collect();
    }
    // Closure re-verification: every involution maps the set into itself.
    for pt in &visited {
        for axis in 1..=3u8 {
            let img = sigma_q(s, axis, pt)?;
            assert!(
                visited.contains(&img),
                "orbit closure failed re-verification"
            );
        }
    }
    Ok(OrbitResult::Finite(visited.into_iter().collect()))
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool construction cannot fail")
            .install(f)
    }
}

/// All points of the reduced surface over F_p, enumerated fiber by
/// fiber in (x, y, z) index order. Fibers are processed in parallel and
/// merged in order, so the output is byte-identical for any worker
/// count. A contained z-fiber contributes all p + 1 of its points.
pub fn fp_enumerate_points(red: &FpSurface, workers: usize) -> Vec<SurfacePointFp> {
    let p = red.modulus();
    with_pool(workers, || {
        (0..=p)
            .into_par_iter()
            .map(|xi| {
                let x = crate::numcore::FpProj::from_index(xi, p);
                let mut fiber = Vec::new();
                for yi in 0..=p {
                    let y = crate::numcore::FpProj::from_index(yi, p);
                    match red.z_fiber_roots(x, y) {
                        Ok(roots) => {
                            for (z, _) in roots {
                                fiber.push(SurfacePointFp::new(x, y, z));
                            }
                        }
                        // The whole z-line over (x, y) lies on the surface.
                        Err(_) => {
                            for zi in 0..=p {
                                let z = crate::numcore::FpProj::from_index(zi, p);
                                fiber.push(SurfacePointFp::new(x, y, z));
                            }
                        }
                    }
                }
                fiber
            })
            .collect::<Vec<_>>()
            .concat()
    })
}

/// Number of points of the surface over F_p.
pub fn fp_point_census(s: &WehlerSurface, p: u64, workers: usize) -> Result<u64, WehlerError> {
    let red = s.reduce_mod(p)?;
    Ok(fp_enumerate_points(&red, workers).len() as u64)
}

/// Orbit partition of the F_p points under the three involutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub prime: u64,
    /// Total number of points on the surface.
    pub census: u64,
    /// Points excluded because some fiber through them lies on the
    /// surface, making an involution undefined there.
    pub quarantined: u64,
    /// (orbit size, number of orbits of that size), sorted by size.
    pub histogram: Vec<(u64, u64)>,
}

impl OrbitPartition {
    /// Sum of size * count over the histogram; equals census minus
    /// quarantined.
    pub fn partitioned_points(&self) -> u64 {
        self.histogram.iter().map(|(s, c)| s * c).sum()
    }

    /// CSV rendering of the histogram, columns size,count.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("size,count\n");
        for (size, count) in &self.histogram {
            out.push_str(&format!("{size},{count}\n"));
        }
        out
    }
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            self.parent[i as usize] = self.parent[self.parent[i as usize] as usize];
            i = self.parent[i as usize];
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Enumerate the surface over F_p and partition its points into orbits
/// under the three involutions. Points on contained fibers are
/// quarantined: they are counted in the census but excluded from the
/// partition, so census = quarantined + sum of size * count.
pub fn fp_orbit_partition(
    s: &WehlerSurface,
    p: u64,
    workers: usize,
) -> Result<OrbitPartition, WehlerError> {
    let red = s.reduce_mod(p)?;
    let points = fp_enumerate_points(&red, workers);
    let index: HashMap<SurfacePointFp, u32> = points
        .iter()
        .enumerate()
        .map(|(i, pt)| (*pt, i as u32))
        .collect();
    // Images along each axis, or None where the fiber is contained.
    let images: Vec<[Option<u32>; 3]> = with_pool(workers, || {
        points
            .par_iter()
            .map(|pt| {
                let mut row = [None, None, None];
                for axis in 1..=3u8 {
                    match red.sigma(axis, pt) {
                        Ok(img) => {
                            let j = *index
                                .get(&img)
                                .expect("involution image left the enumerated surface");
                            row[axis as usize - 1] = Some(j);
                        }
                        Err(WehlerError::ContainedFiber { .. }) => {}
                        Err(e) => panic!("unexpected census error: {e:?}"),
                    }
                }
                row
            })
            .collect()
    });
    let quarantined_flags: Vec<bool> = images
        .iter()
        .map(|row| row.iter().any(|img| img.is_none()))
        .collect();
    let mut dsu = Dsu::new(points.len());
    for (i, row) in images.iter().enumerate() {
        if quarantined_flags[i] {
            continue;
        }
        for img in row.iter().flatten() {
            if !quarantined_flags[*img as usize] {
                dsu.union(i as u32, *img);
            }
        }
    }
    let mut component_size: BTreeMap<u32, u64> = BTreeMap::new();
    for i in 0..points.len() {
        if !quarantined_flags[i] {
            *component_size.entry(dsu.find(i as u32)).or_insert(0) += 1;
        }
    }
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for size in component_size.values() {
        *histogram.entry(*size).or_insert(0) += 1;
    }
    let quarantined = quarantined_flags.iter().filter(|&&q| q).count() as u64;
    Ok(OrbitPartition {
        prime: p,
        census: points.len() as u64,
        quarantined,
        histogram: histogram.into_iter().collect(),
    })
}

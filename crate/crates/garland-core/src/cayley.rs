//! Breadth-first enumeration of balls `B_S(n)` with exact word lengths,
//! deterministic geodesic witnesses and growth statistics.
//!
//! The representative function 𝒲 is fixed by the expansion order: spheres
//! are swept generator-major (lowest generator index first, then parent
//! discovery order), and the first discovery of an element pins its
//! geodesic. Two runs over the same input produce identical indexes.

use std::collections::HashMap;

use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

pub const DEFAULT_ELEMENT_CAP: u64 = 10_000_000;

/// A labeled generator of the ambient group.
#[derive(Debug, Clone)]
pub struct Generator {
    pub label: String,
    pub element: WreathElement,
}

/// An ordered symmetric generating set `S = {s_1, …, s_d}`.
#[derive(Debug, Clone)]
pub struct GeneratingSet {
    gens: Vec<Generator>,
    /// 1-based index of the inverse of each generator.
    inverse_index: Vec<u16>,
    r_s: u32,
}

impl GeneratingSet {
    /// Validates symmetry (each generator's inverse is present) and records
    /// `r_S = max |ρ(s_j)|`.
    pub fn new(shape: &GroupShape, gens: Vec<Generator>) -> Result<GeneratingSet> {
        if gens.is_empty() {
            return Err(Error::Config("generating set is empty".into()));
        }
        if gens.len() > u16::MAX as usize - 1 {
            return Err(Error::Config("too many generators".into()));
        }
        let mut inverse_index = vec![0u16; gens.len()];
        for (j, g) in gens.iter().enumerate() {
            let inv = shape.inverse(&g.element)?;
            let pos = gens
                .iter()
                .position(|h| h.element == inv)
                .ok_or_else(|| Error::NonSymmetric(g.label.clone()))?;
            inverse_index[j] = (pos + 1) as u16;
        }
        let r_s = gens.iter().map(|g| g.element.rho().unsigned_abs()).max().unwrap_or(0);
        Ok(GeneratingSet { gens, inverse_index, r_s })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn elements(&self) -> Vec<WreathElement> {
        self.gens.iter().map(|g| g.element.clone()).collect()
    }

    /// Generator by 1-based index.
    pub fn generator(&self, idx: u16) -> Result<&Generator> {
        self.gens
            .get((idx as usize).wrapping_sub(1))
            .ok_or(Error::IndexOutOfRange(idx, self.gens.len() as u16))
    }

    /// 1-based index of the inverse of generator `idx`.
    pub fn inverse_of(&self, idx: u16) -> Result<u16> {
        self.generator(idx)?;
        Ok(self.inverse_index[idx as usize - 1])
    }

    pub fn r_s(&self) -> u32 {
        self.r_s
    }

    /// The word spelling the inverse element: reversed inverse letters.
    pub fn invert_word(&self, word: &[u16]) -> Result<Vec<u16>> {
        word.iter().rev().map(|&j| self.inverse_of(j)).collect()
    }

    pub fn evaluate(&self, shape: &GroupShape, word: &[u16]) -> Result<WreathElement> {
        let mut acc = WreathElement::identity();
        for &idx in word {
            acc = shape.multiply(&acc, &self.generator(idx)?.element)?;
        }
        Ok(acc)
    }
}

/// An enumerated ball with word lengths and one geodesic witness per element.
#[derive(Debug)]
pub struct BallIndex {
    radius: u32,
    elements: Vec<WreathElement>,
    lengths: Vec<u32>,
    /// Parent position in `elements`; the identity is its own parent.
    parents: Vec<u32>,
    /// 1-based generator index used to reach the element; 0 for the identity.
    gen_used: Vec<u16>,
    index: HashMap<WreathElement, u32>,
    sphere_sizes: Vec<u64>,
}

impl BallIndex {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[WreathElement] {
        &self.elements
    }

    pub fn element(&self, idx: u32) -> &WreathElement {
        &self.elements[idx as usize]
    }

    pub fn length_of_index(&self, idx: u32) -> u32 {
        self.lengths[idx as usize]
    }

    pub fn position(&self, g: &WreathElement) -> Option<u32> {
        self.index.get(g).copied()
    }

    /// Exact `l_S(g)` when `g` lies in the ball.
    pub fn word_length(&self, g: &WreathElement) -> Option<u32> {
        self.position(g).map(|i| self.lengths[i as usize])
    }

    /// The 𝒲-witness: a geodesic word over 1-based generator indices.
    pub fn geodesic_witness(&self, g: &WreathElement) -> Result<Vec<u16>> {
        let idx = self.position(g).ok_or(Error::NotInBall)?;
        Ok(self.witness_by_index(idx))
    }

    pub fn witness_by_index(&self, idx: u32) -> Vec<u16> {
        let mut word = Vec::with_capacity(self.lengths[idx as usize] as usize);
        let mut cur = idx;
        while self.gen_used[cur as usize] != 0 {
            word.push(self.gen_used[cur as usize]);
            cur = self.parents[cur as usize];
        }
        word.reverse();
        word
    }

    pub fn sphere_sizes(&self) -> &[u64] {
        &self.sphere_sizes
    }

    /// `|B_S(k)|` for `k ≤ n` as cumulative sphere sums.
    pub fn ball_sizes(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.sphere_sizes.len());
        let mut acc = 0u64;
        for &s in &self.sphere_sizes {
            acc += s;
            out.push(acc);
        }
        out
    }

    /// Indices of elements with `l_S ≤ k`, in discovery order.
    pub fn indices_within(&self, k: u32) -> impl Iterator<Item = u32> + '_ {
        let cutoff: u64 = self.ball_sizes()[k.min(self.radius) as usize];
        (0..cutoff as u32).map(|i| i)
    }

    /// Rebuilds an index from persisted records, re-deriving the hash map
    /// and validating the per-element links.
    pub fn from_parts(
        radius: u32,
        elements: Vec<WreathElement>,
        lengths: Vec<u32>,
        parents: Vec<u32>,
        gen_used: Vec<u16>,
        sphere_sizes: Vec<u64>,
    ) -> Result<BallIndex> {
        let n = elements.len();
        if lengths.len() != n || parents.len() != n || gen_used.len() != n {
            return Err(Error::Parse("ball record arrays disagree in length".into()));
        }
        if sphere_sizes.len() != radius as usize + 1 || sphere_sizes.iter().sum::<u64>() != n as u64 {
            return Err(Error::Parse("sphere sizes do not sum to the element count".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i as u32).is_some() {
                return Err(Error::Parse("duplicate element in ball record".into()));
            }
        }
        for i in 1..n {
            let p = parents[i] as usize;
            if p >= n || lengths[p] + 1 != lengths[i] || gen_used[i] == 0 {
                return Err(Error::Parse(format!("bad parent link at record {i}")));
            }
        }
        Ok(BallIndex { radius, elements, lengths, parents, gen_used, index, sphere_sizes })
    }

    pub fn parent_of(&self, idx: u32) -> u32 {
        self.parents[idx as usize]
    }

    pub fn generator_used(&self, idx: u32) -> u16 {
        self.gen_used[idx as usize]
    }
}

/// BFS enumeration of `B_S(n)`. Errors with the last completed radius when
/// the element cap would be exceeded.
pub fn enumerate_ball(shape: &GroupShape, s: &GeneratingSet, n: u32, cap: u64) -> Result<BallIndex> {
    let mut elements = vec![WreathElement::identity()];
    let mut lengths = vec![0u32];
    let mut parents = vec![0u32];
    let mut gen_used = vec![0u16];
    let mut index = HashMap::new();
    index.insert(WreathElement::identity(), 0u32);
    let mut sphere_sizes = vec![1u64];
    let mut frontier: Vec<u32> = vec![0];

    for radius in 1..=n {
        let mut next = Vec::new();
        // Generator-major sweep keeps 𝒲 deterministic: ties break on the
        // lowest generator index, then on parent discovery order.
        for (j, gen) in s.gens.iter().enumerate() {
            for &src in &frontier {
                let candidate = shape.multiply(&elements[src as usize], &gen.element)?;
                if index.contains_key(&candidate) {
                    continue;
                }
                if elements.len() as u64 >= cap {
                    return Err(Error::CapExceeded { cap, last_radius: radius - 1 });
                }
                let id = elements.len() as u32;
                index.insert(candidate.clone(), id);
                elements.push(candidate);
                lengths.push(radius);
                parents.push(src);
                gen_used.push((j + 1) as u16);
                next.push(id);
            }
        }
        sphere_sizes.push(next.len() as u64);
        if next.is_empty() {
            // Finite group exhausted; remaining spheres are empty.
            for _ in radius + 1..=n {
                sphere_sizes.push(0);
            }
            frontier = next;
            break;
        }
        frontier = next;
    }

    Ok(BallIndex {
        radius: n,
        elements,
        lengths,
        parents,
        gen_used,
        index,
        sphere_sizes,
    })
}

/// Per-radius growth statistics for a ball-size sequence.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub ball_size: u64,
    pub sphere_size: u64,
    /// `|B_S(n)|^{1/n}`; 0 for n = 0 by convention.
    pub nth_root: f64,
    /// Running Fekete infimum of the nth roots over 1..=n.
    pub fekete_inf: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthStats {
    pub rows: Vec<GrowthRow>,
    /// Pairwise check of `|B(n+m)| ≤ |B(n)|·|B(m)|` over the computed range.
    pub submultiplicative: bool,
    /// Final Fekete infimum: an upper bound for the growth rate over the
    /// computed range, never reported as the limit itself.
    pub rate_upper_bound: f64,
}

/// Nth roots, running infimum and submultiplicativity for sizes indexed from
/// radius 0. Rejects non-monotone input.
pub fn growth_stats(ball_sizes: &[u64]) -> Result<GrowthStats> {
    if ball_sizes.is_empty() || ball_sizes[0] == 0 {
        return Err(Error::Config("ball sizes must start at radius 0 with |B(0)| ≥ 1".into()));
    }
    if ball_sizes.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("ball sizes must be nondecreasing".into()));
    }
    let mut rows = Vec::with_capacity(ball_sizes.len());
    let mut inf = f64::INFINITY;
    for (n, &size) in ball_sizes.iter().enumerate() {
        let nth_root = if n == 0 { 0.0 } else { (size as f64).powf(1.0 / n as f64) };
        if n > 0 {
            inf = inf.min(nth_root);
        }
        let sphere = if n == 0 { size } else { size - ball_sizes[n - 1] };
        rows.push(GrowthRow {
            n: n as u32,
            ball_size: size,
            sphere_size: sphere,
            nth_root,
            fekete_inf: if inf.is_finite() { inf } else { 0.0 },
        });
    }
    let mut submultiplicative = true;
    for n in 1..ball_sizes.len() {
        for m in 1..ball_sizes.len() {
            if n + m < ball_sizes.len() {
                let lhs = ball_sizes[n + m] as u128;
                let rhs = ball_sizes[n] as u128 * ball_sizes[m] as u128;
                if lhs > rhs {
                    submultiplicative = false;
                }
            }
        }
    }
    let rate_upper_bound = if inf.is_finite() { inf } else { 1.0 };
    Ok(GrowthStats { rows, submultiplicative, rate_upper_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordgroup::{CoordinateGroup, HElement};
    use crate::presets;

    #[test]
    fn radius_zero_ball_is_identity() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 0, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(ball.len(), 1);
        assert_eq!(ball.word_length(&WreathElement::identity()), Some(0));
    }

    #[test]
    fn lamplighter_small_ball_sizes() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 2, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(ball.ball_sizes(), vec![1, 4, 10]);
    }

    #[test]
    fn direct_free2_ball_matches_closed_form() {
        let (shape, s) = presets::example15().unwrap();
        let ball = enumerate_ball(&shape, &s, 3, DEFAULT_ELEMENT_CAP).unwrap();
        let sizes = ball.ball_sizes();
        for (n, &size) in sizes.iter().enumerate() {
            let expected = 4 * 3u64.pow(n as u32) - 2 * n as u64 - 3;
            let expected = if n == 0 { 1 } else { expected };
            assert_eq!(size, expected, "radius {n}");
        }
        assert_eq!(sizes[3], 99);
    }

    #[test]
    fn witnesses_have_geodesic_length_and_evaluate_back() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 6, DEFAULT_ELEMENT_CAP).unwrap();
        for idx in 0..ball.len() as u32 {
            let g = ball.element(idx).clone();
            let w = ball.witness_by_index(idx);
            assert_eq!(w.len() as u32, ball.length_of_index(idx));
            assert_eq!(s.evaluate(&shape, &w).unwrap(), g);
        }
    }

    #[test]
    fn single_lamp_at_one_has_length_three() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 4, DEFAULT_ELEMENT_CAP).unwrap();
        let a1 = shape.lamp(1, HElement::Finite(1)).unwrap();
        assert_eq!(ball.word_length(&a1), Some(3));
    }

    #[test]
    fn length_symmetric_under_inverse_and_triangle_inequality() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 7, DEFAULT_ELEMENT_CAP).unwrap();
        for idx in (0..ball.len() as u32).step_by(3) {
            let g = ball.element(idx);
            let inv = shape.inverse(g).unwrap();
            assert_eq!(ball.word_length(&inv), Some(ball.length_of_index(idx)));
        }
        for i in (0..ball.len() as u32).step_by(17) {
            for j in (0..ball.len() as u32).step_by(29) {
                let g = ball.element(i);
                let h = ball.element(j);
                let gh = shape.multiply(g, h).unwrap();
                if let Some(l) = ball.word_length(&gh) {
                    assert!(l <= ball.length_of_index(i) + ball.length_of_index(j));
                }
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let (shape, s) = presets::lamplighter().unwrap();
        let b1 = enumerate_ball(&shape, &s, 6, DEFAULT_ELEMENT_CAP).unwrap();
        let b2 = enumerate_ball(&shape, &s, 6, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(b1.elements(), b2.elements());
        for idx in 0..b1.len() as u32 {
            assert_eq!(b1.witness_by_index(idx), b2.witness_by_index(idx));
        }
    }

    #[test]
    fn cap_reports_last_completed_radius() {
        let (shape, s) = presets::lamplighter().unwrap();
        let err = enumerate_ball(&shape, &s, 6, 9).unwrap_err();
        match err {
            Error::CapExceeded { last_radius, .. } => assert_eq!(last_radius, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_non_symmetric_generating_set() {
        let shape = GroupShape::wreath(CoordinateGroup::cyclic(3).unwrap());
        let gens = vec![
            Generator { label: "a".into(), element: shape.lamp(0, HElement::Finite(1)).unwrap() },
            Generator { label: "t".into(), element: WreathElement::t_power(1) },
            Generator { label: "t^-1".into(), element: WreathElement::t_power(-1) },
        ];
        assert!(matches!(GeneratingSet::new(&shape, gens), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn growth_stats_free_group_infimum_approaches_three() {
        let sizes: Vec<u64> = (0..=10u32).map(|n| 2 * 3u64.pow(n) - 1).collect();
        let stats = growth_stats(&sizes).unwrap();
        assert!(stats.submultiplicative);
        let last = stats.rows.last().unwrap();
        assert!(last.fekete_inf >= 3.0 && last.fekete_inf - 3.0 < 0.2, "inf = {}", last.fekete_inf);
        for w in stats.rows.windows(2).skip(1) {
            assert!(w[1].fekete_inf <= w[0].fekete_inf + 1e-12);
            assert!(w[1].nth_root + 1e-12 >= w[1].fekete_inf);
        }
    }

    #[test]
    fn growth_stats_trivial_group_all_roots_one() {
        let sizes = vec![1u64; 8];
        let stats = growth_stats(&sizes).unwrap();
        assert!(stats.rows.iter().skip(1).all(|r| (r.nth_root - 1.0).abs() < 1e-12));
    }

    #[test]
    fn growth_stats_rejects_non_monotone() {
        assert!(growth_stats(&[1, 4, 3]).is_err());
    }

    #[test]
    fn lamplighter_submultiplicative_up_to_14() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 14, DEFAULT_ELEMENT_CAP).unwrap();
        let stats = growth_stats(&ball.ball_sizes()).unwrap();
        assert!(stats.submultiplicative);
    }
}

//! Exact arithmetic in `G = N ⋊ ⟨t⟩` for the two shapes in use: the
//! restricted wreath product `H ≀ ⟨t⟩` (conjugation by `t` shifts
//! coordinates) and the direct product `H × ⟨t⟩` (trivial action, support
//! confined to position 0).
//!
//! The coordinate convention is fixed once: `(gh)|_i = g|_i · h|_{i+ρ(g)}`,
//! i.e. conjugation by `t` shifts support by `+1`. It is validated
//! bit-exactly against a fully worked five-generator product in the tests.

use std::sync::Arc;

use crate::coordgroup::{CoordinateGroup, HElement};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    /// `H ≀ ⟨t⟩`: conjugation by `t` shifts coordinates.
    Wreath,
    /// `H × ⟨t⟩`: trivial action; supports live at position 0.
    Direct,
}

/// The ambient group shape: which product is formed over which `H`.
#[derive(Debug, Clone)]
pub struct GroupShape {
    pub kind: ShapeKind,
    pub coord: Arc<CoordinateGroup>,
}

/// An element `g = g̃ t^ρ`, stored as its finitely supported non-identity
/// coordinates (sorted by position) plus the t-exponent `ρ(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElement {
    coords: Vec<(i32, HElement)>,
    rho: i32,
}

impl WreathElement {
    pub fn identity() -> WreathElement {
        WreathElement { coords: Vec::new(), rho: 0 }
    }

    pub fn t_power(k: i32) -> WreathElement {
        WreathElement { coords: Vec::new(), rho: k }
    }

    pub fn rho(&self) -> i32 {
        self.rho
    }

    pub fn coords(&self) -> &[(i32, HElement)] {
        &self.coords
    }

    pub fn support(&self) -> Vec<i32> {
        self.coords.iter().map(|(p, _)| *p).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rho == 0 && self.coords.is_empty()
    }

    /// Membership in the base group `N`, i.e. `ρ(g) = 0`.
    pub fn in_base_group(&self) -> bool {
        self.rho == 0
    }

    /// The coordinate `g|_i` (identity where unsupported).
    pub fn coordinate(&self, i: i32, h: &CoordinateGroup) -> HElement {
        match self.coords.binary_search_by_key(&i, |(p, _)| *p) {
            Ok(idx) => self.coords[idx].1.clone(),
            Err(_) => h.identity(),
        }
    }

    /// Injective, run-stable byte key for canonical elements.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.coords.len());
        out.extend_from_slice(&self.rho.to_le_bytes());
        out.extend_from_slice(&(self.coords.len() as u32).to_le_bytes());
        for (pos, val) in &self.coords {
            out.extend_from_slice(&pos.to_le_bytes());
            val.encode(&mut out);
        }
        out
    }

    pub fn from_canonical_key(bytes: &[u8]) -> Result<WreathElement> {
        let bad = || Error::Parse("truncated canonical key".into());
        let rho = i32::from_le_bytes(bytes.get(0..4).ok_or_else(bad)?.try_into().unwrap());
        let count = u32::from_le_bytes(bytes.get(4..8).ok_or_else(bad)?.try_into().unwrap());
        let mut pos = 8usize;
        let mut coords = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let p = i32::from_le_bytes(bytes.get(pos..pos + 4).ok_or_else(bad)?.try_into().unwrap());
            pos += 4;
            let v = HElement::decode(bytes, &mut pos)?;
            coords.push((p, v));
        }
        if pos != bytes.len() {
            return Err(Error::Parse("trailing bytes in canonical key".into()));
        }
        Ok(WreathElement { coords, rho })
    }
}

impl GroupShape {
    pub fn new(kind: ShapeKind, coord: Arc<CoordinateGroup>) -> GroupShape {
        GroupShape { kind, coord }
    }

    pub fn wreath(coord: CoordinateGroup) -> GroupShape {
        GroupShape::new(ShapeKind::Wreath, Arc::new(coord))
    }

    pub fn direct(coord: CoordinateGroup) -> GroupShape {
        GroupShape::new(ShapeKind::Direct, Arc::new(coord))
    }

    pub fn coord(&self) -> &CoordinateGroup {
        &self.coord
    }

    /// Builds a canonical element from raw parts, dropping identity
    /// coordinates and sorting by position. Rejects support outside `{0}`
    /// in the direct shape.
    pub fn element(&self, coords: Vec<(i32, HElement)>, rho: i32) -> Result<WreathElement> {
        let mut cleaned: Vec<(i32, HElement)> = Vec::with_capacity(coords.len());
        for (p, v) in coords {
            if self.kind == ShapeKind::Direct && p != 0 && !self.coord.is_identity(&v) {
                return Err(Error::InvalidElement("direct shape confines support to position 0".into()));
            }
            if !self.coord.is_identity(&v) {
                cleaned.push((p, v));
            }
        }
        cleaned.sort_by_key(|(p, _)| *p);
        for pair in cleaned.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidElement(format!("duplicate coordinate at position {}", pair[0].0)));
            }
        }
        Ok(WreathElement { coords: cleaned, rho })
    }

    /// A single non-identity coordinate `u` at position `p` (an element of
    /// `u^{t^p}` form), with `ρ = 0`.
    pub fn lamp(&self, p: i32, u: HElement) -> Result<WreathElement> {
        self.element(vec![(p, u)], 0)
    }

    /// Exact product. Wreath shape: `ρ(gh) = ρ(g) + ρ(h)` and
    /// `(gh)|_i = g|_i · h|_{i+ρ(g)}`; direct shape: coordinate 0 multiplies
    /// in `H` and exponents add.
    pub fn multiply(&self, g: &WreathElement, h: &WreathElement) -> Result<WreathElement> {
        let shift = match self.kind {
            ShapeKind::Wreath => -g.rho,
            ShapeKind::Direct => 0,
        };
        let mut coords: Vec<(i32, HElement)> = Vec::with_capacity(g.coords.len() + h.coords.len());
        let mut gi = g.coords.iter().peekable();
        let mut hi = h.coords.iter().map(|(p, v)| (p + shift, v)).peekable();
        loop {
            match (gi.peek(), hi.peek()) {
                (Some((gp, _)), Some((hp, _))) if *gp < *hp => {
                    let (p, v) = gi.next().unwrap();
                    coords.push((*p, v.clone()));
                }
                (Some((gp, _)), Some((hp, _))) if *gp > *hp => {
                    let (p, v) = hi.next().unwrap();
                    coords.push((p, v.clone()));
                }
                (Some(_), Some(_)) => {
                    let (p, gv) = gi.next().unwrap();
                    let (_, hv) = hi.next().unwrap();
                    let prod = self.coord.multiply(gv, hv)?;
                    if !self.coord.is_identity(&prod) {
                        coords.push((*p, prod));
                    }
                }
                (Some(_), None) => {
                    let (p, v) = gi.next().unwrap();
                    coords.push((*p, v.clone()));
                }
                (None, Some(_)) => {
                    let (p, v) = hi.next().unwrap();
                    coords.push((p, v.clone()));
                }
                (None, None) => break,
            }
        }
        Ok(WreathElement { coords, rho: g.rho + h.rho })
    }

    /// Exact inverse: `ρ(g⁻¹) = −ρ(g)` and in the wreath shape the support
    /// shifts by `+ρ(g)` with coordinates inverted.
    pub fn inverse(&self, g: &WreathElement) -> Result<WreathElement> {
        let shift = match self.kind {
            ShapeKind::Wreath => g.rho,
            ShapeKind::Direct => 0,
        };
        let mut coords = Vec::with_capacity(g.coords.len());
        for (p, v) in &g.coords {
            coords.push((p + shift, self.coord.inverse(v)?));
        }
        coords.sort_by_key(|(p, _)| *p);
        Ok(WreathElement { coords, rho: -g.rho })
    }

    /// Conjugation `g^{t^i} = t^{-i} g t^{i}`; shifts support by `+i` in the
    /// wreath shape and preserves `ρ`.
    pub fn conjugate_by_t_power(&self, g: &WreathElement, i: i32) -> Result<WreathElement> {
        match self.kind {
            ShapeKind::Direct => Ok(g.clone()),
            ShapeKind::Wreath => {
                let coords = g.coords.iter().map(|(p, v)| (p + i, v.clone())).collect();
                Ok(WreathElement { coords, rho: g.rho })
            }
        }
    }

    /// Left-to-right product of a word over labeled generators.
    pub fn evaluate_word(&self, gens: &[WreathElement], word: &[u16]) -> Result<WreathElement> {
        let mut acc = WreathElement::identity();
        for &idx in word {
            let s = gens
                .get((idx as usize).wrapping_sub(1))
                .ok_or(Error::IndexOutOfRange(idx, gens.len() as u16))?;
            acc = self.multiply(&acc, s)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn lamplighter() -> GroupShape {
        GroupShape::wreath(CoordinateGroup::cyclic(2).unwrap())
    }

    /// The five-generator set of the worked lamplighter example.
    fn paper_gens(shape: &GroupShape) -> Vec<WreathElement> {
        let a = HElement::Finite(1);
        vec![
            shape.element(vec![(4, a.clone())], -3).unwrap(), // s1 = a4 t^-3
            WreathElement::t_power(-2),                       // s2 = t^-2
            shape.element(vec![(1, a.clone())], 3).unwrap(),  // s3 = s1^-1
            WreathElement::t_power(2),                        // s4 = s2^-1
            shape.element(vec![(0, a)], 0).unwrap(),          // s5 = a0
        ]
    }

    #[test]
    fn worked_product_matches_published_support_and_rho() {
        let shape = lamplighter();
        let gens = paper_gens(&shape);
        let word = [2u16, 5, 1, 4, 4, 5, 4, 5, 4];
        let g = shape.evaluate_word(&gens, &word).unwrap();
        assert_eq!(g.rho(), 3);
        assert_eq!(g.support(), vec![-1, 1, 2, 6]);
        for (_, v) in g.coords() {
            assert_eq!(*v, HElement::Finite(1));
        }
    }

    #[test]
    fn inverse_of_lamp_times_t_squared() {
        let shape = lamplighter();
        let g = shape.element(vec![(0, HElement::Finite(1))], 2).unwrap();
        let inv = shape.inverse(&g).unwrap();
        assert_eq!(inv.rho(), -2);
        assert_eq!(inv.support(), vec![2]);
        assert!(shape.multiply(&g, &inv).unwrap().is_identity());
        assert!(shape.multiply(&inv, &g).unwrap().is_identity());
    }

    #[test]
    fn conjugation_shifts_support() {
        let shape = lamplighter();
        let a0 = shape.element(vec![(0, HElement::Finite(1))], 0).unwrap();
        let a2 = shape.conjugate_by_t_power(&a0, 2).unwrap();
        assert_eq!(a2.support(), vec![2]);
        assert_eq!(a2.rho(), 0);
        // Matches t^-2 * a0 * t^2 computed through multiply.
        let lhs = shape
            .multiply(&shape.multiply(&WreathElement::t_power(-2), &a0).unwrap(), &WreathElement::t_power(2))
            .unwrap();
        assert_eq!(lhs, a2);
    }

    fn random_element(shape: &GroupShape, rng: &mut ChaCha8Rng) -> WreathElement {
        let m = match shape.coord().kind() {
            crate::coordgroup::CoordKind::Cyclic { m } => *m,
            _ => 2,
        };
        let coords: Vec<(i32, HElement)> = (0..rng.gen_range(0..5))
            .map(|_| (rng.gen_range(-6..=6), HElement::Finite(rng.gen_range(0..m))))
            .collect();
        let mut dedup = std::collections::BTreeMap::new();
        for (p, v) in coords {
            dedup.insert(p, v);
        }
        shape.element(dedup.into_iter().collect(), rng.gen_range(-4..=4)).unwrap()
    }

    #[test]
    fn multiply_matches_word_expansion_oracle_in_c3() {
        // Expand both factors into explicit generator words and evaluate
        // left-to-right by single-generator multiplication.
        let shape = GroupShape::wreath(CoordinateGroup::cyclic(3).unwrap());
        let a = HElement::Finite(1);
        let gens = vec![
            shape.lamp(0, a.clone()).unwrap(),
            shape.lamp(0, shape.coord().inverse(&a).unwrap()).unwrap(),
            WreathElement::t_power(1),
            WreathElement::t_power(-1),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w1: Vec<u16> = (0..rng.gen_range(0..12)).map(|_| rng.gen_range(1..=4)).collect();
            let w2: Vec<u16> = (0..rng.gen_range(0..12)).map(|_| rng.gen_range(1..=4)).collect();
            let g = shape.evaluate_word(&gens, &w1).unwrap();
            let h = shape.evaluate_word(&gens, &w2).unwrap();
            let concat: Vec<u16> = w1.iter().chain(w2.iter()).copied().collect();
            assert_eq!(shape.multiply(&g, &h).unwrap(), shape.evaluate_word(&gens, &concat).unwrap());
        }
    }

    #[test]
    fn double_inverse_and_rho_homomorphism() {
        let shape = lamplighter();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = random_element(&shape, &mut rng);
            let h = random_element(&shape, &mut rng);
            assert_eq!(shape.inverse(&shape.inverse(&g).unwrap()).unwrap(), g);
            let gh = shape.multiply(&g, &h).unwrap();
            assert_eq!(gh.rho(), g.rho() + h.rho());
            // supp(gh) ⊆ supp(g) ∪ (supp(h) − ρ(g))
            let allowed: std::collections::BTreeSet<i32> = g
                .support()
                .into_iter()
                .chain(h.support().into_iter().map(|p| p - g.rho()))
                .collect();
            assert!(gh.support().iter().all(|p| allowed.contains(p)));
        }
    }

    #[test]
    fn disjoint_supports_commute_in_base_group() {
        let shape = lamplighter();
        let a = HElement::Finite(1);
        let g = shape.element(vec![(-2, a.clone()), (0, a.clone())], 0).unwrap();
        let h = shape.element(vec![(1, a.clone()), (5, a)], 0).unwrap();
        assert_eq!(shape.multiply(&g, &h).unwrap(), shape.multiply(&h, &g).unwrap());
    }

    #[test]
    fn conjugation_composes_additively() {
        let shape = lamplighter();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_element(&shape, &mut rng);
            let i = rng.gen_range(-5..=5);
            let j = rng.gen_range(-5..=5);
            let two_step = shape
                .conjugate_by_t_power(&shape.conjugate_by_t_power(&g, i).unwrap(), j)
                .unwrap();
            assert_eq!(two_step, shape.conjugate_by_t_power(&g, i + j).unwrap());
        }
    }

    #[test]
    fn canonical_keys_are_injective_on_random_sample() {
        let shape = lamplighter();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = std::collections::HashMap::new();
        for _ in 0..10_000 {
            let g = random_element(&shape, &mut rng);
            let key = g.canonical_key();
            assert_eq!(WreathElement::from_canonical_key(&key).unwrap(), g);
            if let Some(prev) = seen.insert(key, g.clone()) {
                assert_eq!(prev, g, "distinct elements produced equal keys");
            }
        }
    }

    #[test]
    fn direct_shape_confines_support() {
        let shape = GroupShape::direct(CoordinateGroup::free(2).unwrap());
        assert!(shape.element(vec![(1, HElement::Word(vec![1]))], 0).is_err());
        let x = shape.element(vec![(0, HElement::Word(vec![1]))], 3).unwrap();
        let y = shape.element(vec![(0, HElement::Word(vec![2]))], -3).unwrap();
        let xy = shape.multiply(&x, &y).unwrap();
        assert_eq!(xy.rho(), 0);
        assert_eq!(xy.coordinate(0, shape.coord()), HElement::Word(vec![1, 2]));
    }
}

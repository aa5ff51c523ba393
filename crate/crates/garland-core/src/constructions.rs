//! Executable forms of the perturbation/recovery machinery: reduced towers
//! over a coordinate, the `ġ(j)` variants with gap-based recovery, the
//! x/y/z split of a geodesic at its extremal itinerary points, and the
//! two-point `J`-variants `g̈(J)` with recovery and injectivity.

use crate::cayley::{BallIndex, GeneratingSet};
use crate::coordgroup::HElement;
use crate::itinerary::{self, Itinerary, ItineraryConstants, Side};
use crate::wreath::{GroupShape, ShapeKind, WreathElement};
use crate::{Error, Result};

/// The reduced product expression of a coordinate `g|_i` along a geodesic
/// word: `κ` picks out the surviving factors (1-based indices into the
/// word), after maximal left-to-right cancellation of sub-products that
/// evaluate to the identity.
#[derive(Debug, Clone)]
pub struct TowerReduction {
    pub position: i32,
    /// Strictly increasing 1-based indices into the geodesic word.
    pub kappa: Vec<u32>,
}

impl TowerReduction {
    pub fn ell(&self) -> usize {
        self.kappa.len()
    }
}

/// The factor sequence `(s_{ι(k)})|_{i − σ(k−1)}` of a word at position `i`.
pub fn coordinate_factors(
    word: &[u16],
    itin: &Itinerary,
    i: i32,
    s: &GeneratingSet,
    shape: &GroupShape,
) -> Result<Vec<HElement>> {
    let coord = shape.coord();
    let mut out = Vec::with_capacity(word.len());
    for (k, &idx) in word.iter().enumerate() {
        let gen = &s.generator(idx)?.element;
        out.push(gen.coordinate(i - itin.sigma()[k], coord));
    }
    Ok(out)
}

/// Builds the reduced tower for `g|_i`: repeatedly removes the longest
/// (leftmost on ties) contiguous block of current factors whose product is
/// the identity, until no such block remains.
pub fn reduced_tower(
    g: &WreathElement,
    word: &[u16],
    i: i32,
    s: &GeneratingSet,
    shape: &GroupShape,
) -> Result<TowerReduction> {
    if s.evaluate(shape, word)? != *g {
        return Err(Error::Precondition("witness word does not evaluate to g".into()));
    }
    let itin = Itinerary::of_word(s, word)?;
    let factors = coordinate_factors(word, &itin, i, s, shape)?;
    let coord = shape.coord();

    let mut current: Vec<(u32, HElement)> = factors
        .into_iter()
        .enumerate()
        .map(|(k, v)| ((k + 1) as u32, v))
        .collect();
    loop {
        let n = current.len();
        let mut best: Option<(usize, usize)> = None; // (start, len)
        for start in 0..n {
            let mut prod = coord.identity();
            for end in start..n {
                prod = coord.multiply(&prod, &current[end].1)?;
                if coord.is_identity(&prod) {
                    let len = end - start + 1;
                    let better = match best {
                        None => true,
                        Some((bs, bl)) => len > bl || (len == bl && start < bs),
                    };
                    if better {
                        best = Some((start, len));
                    }
                }
            }
        }
        match best {
            Some((start, len)) => {
                current.drain(start..start + len);
            }
            None => break,
        }
    }

    if current.is_empty() {
        return Err(Error::DegenerateTower);
    }
    // The reduced product must still evaluate to g|_i.
    let mut prod = coord.identity();
    for (_, v) in &current {
        prod = coord.multiply(&prod, v)?;
    }
    if prod != g.coordinate(i, coord) {
        return Err(Error::MalformedVariant("reduced tower does not reproduce the coordinate".into()));
    }
    Ok(TowerReduction { position: i, kappa: current.into_iter().map(|(k, _)| k).collect() })
}

/// `ġ(j) = g_{j,1} · t^{−3q−4C} · g_{j,2}`, splitting the geodesic at
/// `κ(j)`. `q` is the integer ceiling of the admissibility bound the caller
/// enforced (`maxit − minit ≤ q`).
pub fn dot_variant(
    g: &WreathElement,
    j: usize,
    q: i32,
    tower: &TowerReduction,
    word: &[u16],
    s: &GeneratingSet,
    shape: &GroupShape,
    consts: &ItineraryConstants,
) -> Result<WreathElement> {
    if j == 0 || j > tower.ell() {
        return Err(Error::Precondition(format!("tower index {j} outside 1..={}", tower.ell())));
    }
    let itin = Itinerary::of_word(s, word)?;
    let split_at = tower.kappa[j - 1] as usize;
    let (i1, i2) = itin.split(split_at)?;
    let g1 = itinerary::evaluate(s, &i1, shape)?;
    let g2 = itinerary::evaluate(s, &i2, shape)?;
    let shift = WreathElement::t_power(-(3 * q + 4 * consts.c));
    shape.multiply(&shape.multiply(&g1, &shift)?, &g2)
}

/// An explicit word for `ġ(j)` witnessing membership in
/// `B(l_S(g) + (3q+4C)·l_S(t))`.
pub fn dot_variant_word(
    j: usize,
    q: i32,
    tower: &TowerReduction,
    word: &[u16],
    ball: &BallIndex,
    consts: &ItineraryConstants,
) -> Result<Vec<u16>> {
    if j == 0 || j > tower.ell() {
        return Err(Error::Precondition(format!("tower index {j} outside 1..={}", tower.ell())));
    }
    let split_at = tower.kappa[j - 1] as usize;
    let m = 3 * q + 4 * consts.c;
    let mut out = Vec::with_capacity(word.len() + m.unsigned_abs() as usize * consts.l_t as usize);
    out.extend_from_slice(&word[..split_at]);
    out.extend(
        ball.geodesic_witness(&WreathElement::t_power(-m))
            .map_err(|_| Error::InsufficientRadius { need: m.unsigned_abs(), have: ball.radius() })?,
    );
    out.extend_from_slice(&word[split_at..]);
    Ok(out)
}

/// Inverts `ġ(j)`: locates the support gap of at least `q + 2C` separating
/// the two components and recombines `g|_i = h|_i · h|_{i+3q+4C}` over the
/// window `[−q−C, q+C]`.
pub fn recover_from_dot(h: &WreathElement, q: i32, c: i32, shape: &GroupShape) -> Result<WreathElement> {
    let m = 3 * q + 4 * c;
    if h.rho() != -m {
        return Err(Error::MalformedVariant(format!("expected ρ = {}, found {}", -m, h.rho())));
    }
    let lo_window = -q - c..=q + c;
    let hi_window = 2 * q + 3 * c..=4 * q + 5 * c;
    let mut max_lo = i32::MIN;
    let mut min_hi = i32::MAX;
    for p in h.support() {
        if lo_window.contains(&p) {
            max_lo = max_lo.max(p);
        } else if hi_window.contains(&p) {
            min_hi = min_hi.min(p);
        } else {
            return Err(Error::MalformedVariant(format!("support point {p} outside both component windows")));
        }
    }
    if max_lo > i32::MIN && min_hi < i32::MAX && min_hi - max_lo < q + 2 * c {
        return Err(Error::MalformedVariant("no qualifying gap between components".into()));
    }
    let coord = shape.coord();
    let mut coords = Vec::new();
    for i in -q - c..=q + c {
        let v = coord.multiply(&h.coordinate(i, coord), &h.coordinate(i + m, coord))?;
        if !coord.is_identity(&v) {
            coords.push((i, v));
        }
    }
    shape.element(coords, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `k⁺ ≤ k⁻`: the maximum itinerary point is reached first.
    PlusFirst,
    /// `k⁻ < k⁺`.
    MinusFirst,
}

/// The split of a base-group geodesic at its extremal itinerary points:
/// `g = x·y·z` with the three sub-itineraries automatically geodesic.
#[derive(Debug, Clone)]
pub struct SigmaSplit {
    pub sigma_plus: i32,
    pub sigma_minus: i32,
    pub k_plus: usize,
    pub k_minus: usize,
    pub orientation: Orientation,
    pub x: WreathElement,
    pub y: WreathElement,
    pub z: WreathElement,
    pub word_x: Vec<u16>,
    pub word_y: Vec<u16>,
    pub word_z: Vec<u16>,
}

pub fn xyz_split(
    g: &WreathElement,
    word: &[u16],
    s: &GeneratingSet,
    shape: &GroupShape,
) -> Result<SigmaSplit> {
    if !g.in_base_group() {
        return Err(Error::Precondition("x/y/z split requires ρ(g) = 0".into()));
    }
    if s.evaluate(shape, word)? != *g {
        return Err(Error::Precondition("witness word does not evaluate to g".into()));
    }
    let itin = Itinerary::of_word(s, word)?;
    let sigma_plus = itin.maxit();
    let sigma_minus = itin.minit();
    let sig = itin.sigma();
    let k_plus = sig.iter().position(|&v| v == sigma_plus).unwrap();
    let k_minus = sig.iter().position(|&v| v == sigma_minus).unwrap();
    let orientation = if k_plus <= k_minus { Orientation::PlusFirst } else { Orientation::MinusFirst };
    let (first, second) = match orientation {
        Orientation::PlusFirst => (k_plus, k_minus),
        Orientation::MinusFirst => (k_minus, k_plus),
    };
    let (i1, rest) = itin.split(first)?;
    let (i2, i3) = rest.split(second - first)?;
    let x = itinerary::evaluate(s, &i1, shape)?;
    let y = itinerary::evaluate(s, &i2, shape)?;
    let z = itinerary::evaluate(s, &i3, shape)?;
    let xyz = shape.multiply(&shape.multiply(&x, &y)?, &z)?;
    if xyz != *g {
        return Err(Error::MalformedVariant("x·y·z does not reproduce g".into()));
    }
    let expect = match orientation {
        Orientation::PlusFirst => (-sigma_plus, sigma_plus - sigma_minus, sigma_minus),
        Orientation::MinusFirst => (-sigma_minus, sigma_minus - sigma_plus, sigma_plus),
    };
    if (x.rho(), y.rho(), z.rho()) != expect {
        return Err(Error::MalformedVariant("x/y/z exponents violate the split identities".into()));
    }
    Ok(SigmaSplit {
        sigma_plus,
        sigma_minus,
        k_plus,
        k_minus,
        orientation,
        x,
        y,
        z,
        word_x: word[..first].to_vec(),
        word_y: word[first..second].to_vec(),
        word_z: word[second..].to_vec(),
    })
}

/// A two-point variant `g̈(J)`.
#[derive(Debug, Clone)]
pub struct JVariant {
    pub j: (i32, i32),
    pub orientation: Orientation,
    pub element: WreathElement,
    pub x_dot: WreathElement,
    pub y_dot: WreathElement,
    pub z_dot: WreathElement,
}

fn edit_coordinate(
    shape: &GroupShape,
    e: &WreathElement,
    pos: i32,
    u: &HElement,
    side: Side,
) -> Result<WreathElement> {
    let coord = shape.coord();
    let old = e.coordinate(pos, coord);
    let new = match side {
        Side::Right => coord.multiply(&old, u)?,
        Side::Left => coord.multiply(u, &old)?,
    };
    let mut coords: Vec<(i32, HElement)> =
        e.coords().iter().filter(|(p, _)| *p != pos).cloned().collect();
    coords.push((pos, new));
    shape.element(coords, e.rho())
}

/// The coordinate edits applied to the three pieces for a given `J`, as
/// (piece, local position, inserted element side) triples. Piece 0 = x,
/// 1 = y, 2 = z.
fn edit_plan(split: &SigmaSplit, j: i32) -> [(usize, i32, Side); 2] {
    match split.orientation {
        Orientation::PlusFirst => {
            if j >= 0 {
                [(0, j, Side::Right), (1, j - split.sigma_plus, Side::Left)]
            } else {
                [(1, j - split.sigma_plus, Side::Right), (2, j - split.sigma_minus, Side::Left)]
            }
        }
        Orientation::MinusFirst => {
            if j < 0 {
                [(0, j, Side::Right), (1, j - split.sigma_minus, Side::Left)]
            } else {
                [(1, j - split.sigma_minus, Side::Right), (2, j - split.sigma_plus, Side::Left)]
            }
        }
    }
}

/// Builds `g̈(J) = ẋ(J) t^{∓2C} ẏ(J)⁻¹ t^{∓2C} ż(J)` for a two-element
/// `J ⊆ [σ⁻, σ⁺]` and `u ≠ 1`; validates `ẋ·ẏ·ż = g` and the exponent
/// signature before returning.
pub fn j_variant(
    split: &SigmaSplit,
    j_set: (i32, i32),
    u: &HElement,
    c: i32,
    shape: &GroupShape,
) -> Result<JVariant> {
    let (j1, j2) = j_set;
    if j1 == j2 {
        return Err(Error::Precondition("J must contain two distinct points".into()));
    }
    if shape.coord().is_identity(u) {
        return Err(Error::Precondition("u must differ from the identity".into()));
    }
    for j in [j1, j2] {
        if j < split.sigma_minus || j > split.sigma_plus {
            return Err(Error::Precondition(format!(
                "J point {j} outside [{}, {}]",
                split.sigma_minus, split.sigma_plus
            )));
        }
    }
    let u_inv = shape.coord().inverse(u)?;
    let mut pieces = [split.x.clone(), split.y.clone(), split.z.clone()];
    for j in [j1, j2] {
        for (piece, pos, side) in edit_plan(split, j) {
            let value = if piece == 1 { &u_inv } else { u };
            pieces[piece] = edit_coordinate(shape, &pieces[piece], pos, value, side)?;
        }
    }
    let [x_dot, y_dot, z_dot] = pieces;
    let recombined = shape.multiply(&shape.multiply(&x_dot, &y_dot)?, &z_dot)?;
    let original = shape.multiply(&shape.multiply(&split.x, &split.y)?, &split.z)?;
    if recombined != original {
        return Err(Error::MalformedVariant("perturbed pieces no longer multiply to g".into()));
    }
    let step = match split.orientation {
        Orientation::PlusFirst => WreathElement::t_power(-2 * c),
        Orientation::MinusFirst => WreathElement::t_power(2 * c),
    };
    let y_dot_inv = shape.inverse(&y_dot)?;
    let mut element = shape.multiply(&x_dot, &step)?;
    element = shape.multiply(&element, &y_dot_inv)?;
    element = shape.multiply(&element, &step)?;
    element = shape.multiply(&element, &z_dot)?;
    let expected_rho = match split.orientation {
        Orientation::PlusFirst => 2 * (split.sigma_minus - split.sigma_plus) - 4 * c,
        Orientation::MinusFirst => 2 * (split.sigma_plus - split.sigma_minus) + 4 * c,
    };
    if element.rho() != expected_rho {
        return Err(Error::MalformedVariant("variant exponent violates its orientation signature".into()));
    }
    let j_sorted = (j1.min(j2), j1.max(j2));
    Ok(JVariant { j: j_sorted, orientation: split.orientation, element, x_dot, y_dot, z_dot })
}

/// An explicit word for `g̈(J)` of length at most `l_S(g) + D'`, assembled
/// from per-piece insertion certificates. Equality with the variant element
/// is verified, so the word's length witnesses the bound exactly.
pub fn j_variant_word(
    split: &SigmaSplit,
    variant: &JVariant,
    u: &HElement,
    s: &GeneratingSet,
    shape: &GroupShape,
    ball: &BallIndex,
    consts: &ItineraryConstants,
) -> Result<Vec<u16>> {
    let u_inv = shape.coord().inverse(u)?;
    let mut words = [split.word_x.clone(), split.word_y.clone(), split.word_z.clone()];
    let mut elems = [split.x.clone(), split.y.clone(), split.z.clone()];
    let (j1, j2) = variant.j;
    // Per piece, apply the edits in deterministic order; the second edit
    // rebases on a ball geodesic of the once-edited element.
    let mut plans: Vec<(usize, i32, Side, bool)> = Vec::new();
    for j in [j1, j2] {
        for (piece, pos, side) in edit_plan(split, j) {
            plans.push((piece, pos, side, piece == 1));
        }
    }
    plans.sort_by_key(|&(piece, pos, _, _)| (piece, pos));
    for (piece, pos, side, inverted) in plans {
        let value = if inverted { &u_inv } else { u };
        let base_word = if words[piece].len() as u32 == ball.word_length(&elems[piece]).ok_or(
            Error::InsufficientRadius { need: ball.radius() + 1, have: ball.radius() },
        )? {
            words[piece].clone()
        } else {
            ball.geodesic_witness(&elems[piece])?
        };
        let out = itinerary::insert_coordinate(
            &elems[piece], &base_word, value, pos, side, s, shape, ball, consts,
        )?;
        elems[piece] = out.element;
        words[piece] = out.word;
    }
    let t_word = |k: i32| -> Result<Vec<u16>> {
        ball.geodesic_witness(&WreathElement::t_power(k))
            .map_err(|_| Error::InsufficientRadius { need: k.unsigned_abs(), have: ball.radius() })
    };
    let step = match split.orientation {
        Orientation::PlusFirst => -2 * consts.c,
        Orientation::MinusFirst => 2 * consts.c,
    };
    let mut word = words[0].clone();
    word.extend(t_word(step)?);
    word.extend(s.invert_word(&words[1])?);
    word.extend(t_word(step)?);
    word.extend(words[2].iter().copied());
    if s.evaluate(shape, &word)? != variant.element {
        return Err(Error::MalformedVariant("variant certificate does not evaluate to g̈(J)".into()));
    }
    if elems[0] != variant.x_dot || elems[1] != variant.y_dot || elems[2] != variant.z_dot {
        return Err(Error::MalformedVariant("insertion route disagrees with the coordinate edits".into()));
    }
    Ok(word)
}

/// Recovers `(g, J)` from a variant and one extremal point `σ⁺`, reading
/// the three pieces off their disjoint support windows and recomputing the
/// canonical split of the recovered element to locate the edits.
pub fn recover_from_jvariant(
    h: &WreathElement,
    sigma_plus: i32,
    u: &HElement,
    c: i32,
    shape: &GroupShape,
    s: &GeneratingSet,
    ball: &BallIndex,
) -> Result<(WreathElement, (i32, i32))> {
    if shape.kind != ShapeKind::Wreath {
        return Err(Error::Precondition("J-variants are defined for the wreath shape".into()));
    }
    let rho = h.rho();
    let coord = shape.coord();
    let (orientation, sigma_minus) = if rho <= -4 {
        let delta = rho + 4 * c;
        if delta % 2 != 0 {
            return Err(Error::MalformedVariant("exponent parity mismatch".into()));
        }
        (Orientation::PlusFirst, sigma_plus + delta / 2)
    } else if rho >= 4 {
        let delta = rho - 4 * c;
        if delta % 2 != 0 {
            return Err(Error::MalformedVariant("exponent parity mismatch".into()));
        }
        (Orientation::MinusFirst, sigma_plus - delta / 2)
    } else {
        return Err(Error::MalformedVariant(format!("exponent {rho} matches no orientation")));
    };
    if sigma_minus > 0 || sigma_plus < 0 {
        return Err(Error::MalformedVariant("derived extremal points do not straddle 0".into()));
    }

    let read = |window_lo: i32, window_hi: i32, shift: i32, rho: i32| -> Result<WreathElement> {
        let mut coords = Vec::new();
        for p in window_lo..=window_hi {
            let v = h.coordinate(p + shift, coord);
            if !coord.is_identity(&v) {
                coords.push((p, v));
            }
        }
        shape.element(coords, rho)
    };
    let spread = sigma_plus - sigma_minus;
    let (x_dot, y_dot_inv, z_dot) = match orientation {
        Orientation::PlusFirst => (
            read(sigma_minus - c + 1, sigma_plus + c - 1, 0, -sigma_plus)?,
            read(-c + 1, spread + c - 1, sigma_plus + 2 * c, sigma_minus - sigma_plus)?,
            read(-c + 1, spread + c - 1, 2 * sigma_plus - sigma_minus + 4 * c, sigma_minus)?,
        ),
        Orientation::MinusFirst => (
            read(sigma_minus - c + 1, sigma_plus + c - 1, 0, -sigma_minus)?,
            read(-spread - c + 1, c - 1, sigma_minus - 2 * c, sigma_plus - sigma_minus)?,
            read(-spread - c + 1, c - 1, 2 * sigma_minus - sigma_plus - 4 * c, sigma_plus)?,
        ),
    };
    let claimed: usize = x_dot.coords().len() + y_dot_inv.coords().len() + z_dot.coords().len();
    if claimed != h.coords().len() {
        return Err(Error::MalformedVariant("support windows do not cover the variant".into()));
    }
    let y_dot = shape.inverse(&y_dot_inv)?;
    let g = shape.multiply(&shape.multiply(&x_dot, &y_dot)?, &z_dot)?;
    if !g.in_base_group() {
        return Err(Error::MalformedVariant("recovered element is not in the base group".into()));
    }

    let word = ball.geodesic_witness(&g)?;
    let split = xyz_split(&g, &word, s, shape)?;
    if split.sigma_plus != sigma_plus || split.sigma_minus != sigma_minus || split.orientation != orientation
    {
        return Err(Error::MalformedVariant("recovered element has different extremal points".into()));
    }
    // The edits sit where the dotted pieces differ from the canonical ones.
    let mut j_points = Vec::new();
    for j in sigma_minus..=sigma_plus {
        let (piece_dot, piece, pos) = match orientation {
            Orientation::PlusFirst => {
                if j >= 0 {
                    (&x_dot, &split.x, j)
                } else {
                    (&z_dot, &split.z, j - sigma_minus)
                }
            }
            Orientation::MinusFirst => {
                if j < 0 {
                    (&x_dot, &split.x, j)
                } else {
                    (&z_dot, &split.z, j - sigma_plus)
                }
            }
        };
        if piece_dot.coordinate(pos, coord) != piece.coordinate(pos, coord) {
            j_points.push(j);
        }
    }
    if j_points.len() != 2 {
        return Err(Error::MalformedVariant(format!(
            "expected exactly two edited positions, found {}",
            j_points.len()
        )));
    }
    let j_set = (j_points[0], j_points[1]);
    // Cross-check: rebuilding the variant from the recovered data gives h.
    let rebuilt = j_variant(&split, j_set, u, c, shape)?;
    if rebuilt.element != *h {
        return Err(Error::MalformedVariant("rebuilt variant disagrees with the input".into()));
    }
    Ok((g, j_set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::presets;

    fn setup() -> (GroupShape, GeneratingSet, BallIndex, ItineraryConstants) {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 14, 10_000_000).unwrap();
        let u = HElement::Finite(1);
        let consts = ItineraryConstants::compute(&shape, &s, &u, &ball).unwrap();
        (shape, s, ball, consts)
    }

    #[test]
    fn constants_for_standard_lamplighter() {
        let (_, _, _, consts) = setup();
        assert_eq!(consts.c, 1);
        assert_eq!(consts.r_s, 1);
        assert_eq!(consts.m_s, 1);
        assert_eq!(consts.d, 5); // l(a) + 2·l(t²) = 1 + 4
        assert_eq!(consts.d_prime, 34); // 6·5 + 2·l(t²)
        assert_eq!(consts.l_t, 1);
    }

    #[test]
    fn single_generator_tower_is_trivial() {
        let (shape, s, _, _) = setup();
        let g = shape.lamp(0, HElement::Finite(1)).unwrap();
        let tower = reduced_tower(&g, &[1], 0, &s, &shape).unwrap();
        assert_eq!(tower.kappa, vec![1]);
    }

    #[test]
    fn aaa_word_cancels_leading_pair() {
        let (shape, s, _, _) = setup();
        // a·a·a evaluates to a single lamp; the first a·a block cancels.
        let g = shape.lamp(0, HElement::Finite(1)).unwrap();
        let tower = reduced_tower(&g, &[1, 1, 1], 0, &s, &shape).unwrap();
        assert_eq!(tower.kappa, vec![3]);
    }

    #[test]
    fn degenerate_tower_is_reported() {
        let (shape, s, _, _) = setup();
        let word = [1u16, 1];
        let g = s.evaluate(&shape, &word).unwrap();
        assert!(g.is_identity());
        assert!(matches!(reduced_tower(&g, &word, 0, &s, &shape), Err(Error::DegenerateTower)));
    }

    #[test]
    fn tower_tail_products_are_nontrivial() {
        let (shape, s, ball, _) = setup();
        let coord = shape.coord();
        let mut checked = 0;
        for idx in 0..ball.len() as u32 {
            if ball.length_of_index(idx) > 10 {
                break;
            }
            let g = ball.element(idx).clone();
            if g.coords().is_empty() {
                continue;
            }
            let i = g.support()[0];
            let word = ball.witness_by_index(idx);
            let tower = reduced_tower(&g, &word, i, &s, &shape).unwrap();
            let itin = Itinerary::of_word(&s, &word).unwrap();
            let factors = coordinate_factors(&word, &itin, i, &s, &shape).unwrap();
            // Tail products between consecutive kappa indices are the
            // surviving factors; every consecutive run must be nontrivial.
            for a in 0..tower.kappa.len() {
                for b in a..tower.kappa.len() {
                    let mut prod = coord.identity();
                    for k in tower.kappa[a]..=tower.kappa[b] {
                        prod = coord.multiply(&prod, &factors[(k - 1) as usize]).unwrap();
                    }
                    // Product over the original range collapses to the kept
                    // factors in [a, b]; it must be nontrivial when taken
                    // from just after a previous kept index.
                    let from = if a == 0 { 1 } else { tower.kappa[a - 1] + 1 };
                    let mut full = coord.identity();
                    for k in from..=tower.kappa[b] {
                        full = coord.multiply(&full, &factors[(k - 1) as usize]).unwrap();
                    }
                    assert!(!coord.is_identity(&full), "vanishing tail product");
                    let _ = prod;
                }
            }
            checked += 1;
            if checked >= 100 {
                break;
            }
        }
        assert!(checked >= 100, "only {checked} elements examined");
    }

    #[test]
    fn dot_variant_round_trips_and_distinguishes_towers() {
        let (shape, s, ball, consts) = setup();
        let q = 2;
        let mut seen = 0;
        for idx in 0..ball.len() as u32 {
            if ball.length_of_index(idx) > 8 {
                break;
            }
            let g = ball.element(idx).clone();
            if !g.in_base_group() || g.coords().is_empty() {
                continue;
            }
            let word = ball.witness_by_index(idx);
            let itin = Itinerary::of_word(&s, &word).unwrap();
            if itin.spread() > q {
                continue;
            }
            let i = g.support()[0];
            let tower = reduced_tower(&g, &word, i, &s, &shape).unwrap();
            let mut variants = Vec::new();
            for j in 1..=tower.ell() {
                let dot = dot_variant(&g, j, q, &tower, &word, &s, &shape, &consts).unwrap();
                let back = recover_from_dot(&dot, q, consts.c, &shape).unwrap();
                assert_eq!(back, g, "round trip failed");
                let cert = dot_variant_word(j, q, &tower, &word, &ball, &consts).unwrap();
                assert_eq!(s.evaluate(&shape, &cert).unwrap(), dot);
                assert!(cert.len() as u32 <= word.len() as u32 + ((3 * q + 4 * consts.c) as u32) * consts.l_t);
                variants.push(dot.canonical_key());
            }
            variants.sort();
            let before = variants.len();
            variants.dedup();
            assert_eq!(before, variants.len(), "variants are not pairwise distinct");
            seen += 1;
            if seen >= 60 {
                break;
            }
        }
        assert!(seen >= 40);
    }

    #[test]
    fn recover_rejects_malformed_variants() {
        let (shape, _, _, consts) = setup();
        let q = 2;
        // Wrong exponent.
        let bad = WreathElement::t_power(-3);
        assert!(recover_from_dot(&bad, q, consts.c, &shape).is_err());
        // Support outside both windows.
        let m = 3 * q + 4 * consts.c;
        let stray = shape
            .element(vec![(q + consts.c + 1, HElement::Finite(1))], -m)
            .unwrap();
        assert!(recover_from_dot(&stray, q, consts.c, &shape).is_err());
    }

    #[test]
    fn xyz_split_identities() {
        let (shape, s, ball, _) = setup();
        let id = WreathElement::identity();
        let split = xyz_split(&id, &[], &s, &shape).unwrap();
        assert_eq!((split.sigma_plus, split.sigma_minus), (0, 0));
        assert!(split.x.is_identity() && split.y.is_identity() && split.z.is_identity());

        let mut checked = 0;
        for idx in 0..ball.len() as u32 {
            if ball.length_of_index(idx) > 10 {
                break;
            }
            let g = ball.element(idx).clone();
            if !g.in_base_group() {
                continue;
            }
            let word = ball.witness_by_index(idx);
            let split = xyz_split(&g, &word, &s, &shape).unwrap();
            let xyz = shape
                .multiply(&shape.multiply(&split.x, &split.y).unwrap(), &split.z)
                .unwrap();
            assert_eq!(xyz, g);
            assert_eq!(
                split.word_x.len() + split.word_y.len() + split.word_z.len(),
                word.len()
            );
            checked += 1;
            if checked >= 100 {
                break;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn xyz_split_rejects_nonzero_exponent() {
        let (shape, s, ball, _) = setup();
        let t = WreathElement::t_power(1);
        let word = ball.geodesic_witness(&t).unwrap();
        assert!(xyz_split(&t, &word, &s, &shape).is_err());
    }

    #[test]
    fn j_variant_round_trip_with_injectivity() {
        let (shape, s, ball, consts) = setup();
        let u = HElement::Finite(1);
        let mut examined = 0;
        for idx in 0..ball.len() as u32 {
            if ball.length_of_index(idx) > 8 {
                break;
            }
            let g = ball.element(idx).clone();
            if !g.in_base_group() {
                continue;
            }
            let word = ball.witness_by_index(idx);
            let split = xyz_split(&g, &word, &s, &shape).unwrap();
            if split.sigma_plus - split.sigma_minus < 1 {
                continue;
            }
            let mut keys = Vec::new();
            for j1 in split.sigma_minus..=split.sigma_plus {
                for j2 in (j1 + 1)..=split.sigma_plus {
                    let var = j_variant(&split, (j1, j2), &u, consts.c, &shape).unwrap();
                    let (back, j_back) =
                        recover_from_jvariant(&var.element, split.sigma_plus, &u, consts.c, &shape, &s, &ball)
                            .unwrap();
                    assert_eq!(back, g);
                    assert_eq!(j_back, (j1, j2));
                    match var.orientation {
                        Orientation::PlusFirst => assert!(var.element.rho() <= -4),
                        Orientation::MinusFirst => assert!(var.element.rho() >= 4),
                    }
                    let cert = j_variant_word(&split, &var, &u, &s, &shape, &ball, &consts).unwrap();
                    assert!(
                        (cert.len() as u32) <= word.len() as u32 + consts.d_prime,
                        "certificate too long: {} > {} + {}",
                        cert.len(),
                        word.len(),
                        consts.d_prime
                    );
                    keys.push(var.element.canonical_key());
                }
            }
            let total = keys.len();
            keys.sort();
            keys.dedup();
            assert_eq!(total, keys.len(), "distinct J gave equal variants");
            examined += 1;
            if examined >= 40 {
                break;
            }
        }
        assert!(examined >= 20, "only {examined} elements had σ⁺ − σ⁻ ≥ 1");
    }

    #[test]
    fn j_variant_rejects_bad_inputs() {
        let (shape, s, ball, consts) = setup();
        let u = HElement::Finite(1);
        let g = shape.lamp(0, u.clone()).unwrap();
        let word = ball.geodesic_witness(&g).unwrap();
        let split = xyz_split(&g, &word, &s, &shape).unwrap();
        // σ⁺ = σ⁻ = 0 leaves no two-element J.
        assert_eq!(split.sigma_plus, split.sigma_minus);
        assert!(j_variant(&split, (0, 0), &u, consts.c, &shape).is_err());
        assert!(j_variant(&split, (0, 1), &u, consts.c, &shape).is_err());
        // u = 1 rejected.
        let a1 = shape.lamp(1, u.clone()).unwrap();
        let a0 = shape.lamp(0, u.clone()).unwrap();
        let g2 = shape.multiply(&a1, &a0).unwrap();
        let word2 = ball.geodesic_witness(&g2).unwrap();
        let split2 = xyz_split(&g2, &word2, &s, &shape).unwrap();
        assert!(split2.sigma_plus - split2.sigma_minus >= 1);
        let id = shape.coord().identity();
        assert!(j_variant(&split2, (split2.sigma_minus, split2.sigma_plus), &id, consts.c, &shape).is_err());
    }
}

//! The S-expression/itinerary calculus: the pair `(ι, σ)` attached to a
//! word over `S`, itinerary products and splits, the support/insertion
//! constants `C`, `m_S`, `D`, `D'`, and coordinate insertion with an
//! explicit word certificate for the length bound.

use std::fmt;

use crate::cayley::{BallIndex, GeneratingSet};
use crate::coordgroup::HElement;
use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

/// The itinerary `(ι, σ)` of an S-expression: `ι` is the generator-index
/// sequence (1-based), `σ` the negative cumulative t-exponent sequence with
/// `σ(0) = 0` and `σ(k) − σ(k−1) = −ρ(s_{ι(k)})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itinerary {
    iota: Vec<u16>,
    sigma: Vec<i32>,
}

impl Itinerary {
    pub fn of_word(s: &GeneratingSet, word: &[u16]) -> Result<Itinerary> {
        let mut sigma = Vec::with_capacity(word.len() + 1);
        sigma.push(0);
        let mut acc = 0i32;
        for &idx in word {
            acc -= s.generator(idx)?.element.rho();
            sigma.push(acc);
        }
        Ok(Itinerary { iota: word.to_vec(), sigma })
    }

    pub fn empty() -> Itinerary {
        Itinerary { iota: Vec::new(), sigma: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.iota.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iota.is_empty()
    }

    pub fn iota(&self) -> &[u16] {
        &self.iota
    }

    pub fn sigma(&self) -> &[i32] {
        &self.sigma
    }

    pub fn maxit(&self) -> i32 {
        *self.sigma.iter().max().expect("sigma is nonempty")
    }

    pub fn minit(&self) -> i32 {
        *self.sigma.iter().min().expect("sigma is nonempty")
    }

    /// `maxit − minit`.
    pub fn spread(&self) -> i32 {
        self.maxit() - self.minit()
    }

    /// Product itinerary: `ι` concatenates, the second `σ`-leg is shifted by
    /// `σ₁(l₁)`.
    pub fn product(&self, other: &Itinerary) -> Itinerary {
        let mut iota = self.iota.clone();
        iota.extend_from_slice(&other.iota);
        let offset = *self.sigma.last().unwrap();
        let mut sigma = self.sigma.clone();
        sigma.extend(other.sigma.iter().skip(1).map(|v| v + offset));
        Itinerary { iota, sigma }
    }

    /// The unique decomposition at `l1`: `σ₂(k) = σ(l1 + k) − σ(l1)`.
    pub fn split(&self, l1: usize) -> Result<(Itinerary, Itinerary)> {
        if l1 > self.len() {
            return Err(Error::SplitOutOfRange(l1, self.len()));
        }
        let left = Itinerary {
            iota: self.iota[..l1].to_vec(),
            sigma: self.sigma[..=l1].to_vec(),
        };
        let base = self.sigma[l1];
        let right = Itinerary {
            iota: self.iota[l1..].to_vec(),
            sigma: self.sigma[l1..].iter().map(|v| v - base).collect(),
        };
        Ok((left, right))
    }

    /// Paper-style rendering: two parenthesized integer sequences.
    pub fn render(&self) -> String {
        let seq = |v: &[i32]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        };
        let iota: Vec<i32> = self.iota.iter().map(|&x| x as i32).collect();
        format!("(({}), ({}))", seq(&iota), seq(&self.sigma))
    }

    pub fn parse(text: &str) -> Result<Itinerary> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Parse("itinerary must be wrapped in parentheses".into()))?;
        let mut seqs: Vec<Vec<i32>> = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        for ch in inner.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.clear();
                }
                ')' => {
                    if depth == 0 {
                        return Err(Error::Parse("unbalanced parentheses".into()));
                    }
                    depth -= 1;
                    let seq: Vec<i32> = cur
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad integer {s}"))))
                        .collect::<Result<_>>()?;
                    seqs.push(seq);
                }
                _ if depth > 0 => cur.push(ch),
                _ => {}
            }
        }
        if seqs.len() != 2 {
            return Err(Error::Parse("expected two sequences".into()));
        }
        let iota: Vec<u16> = seqs[0]
            .iter()
            .map(|&v| u16::try_from(v).map_err(|_| Error::Parse(format!("bad index {v}"))))
            .collect::<Result<_>>()?;
        let sigma = seqs[1].clone();
        let itin = Itinerary { iota, sigma };
        if itin.sigma.len() != itin.iota.len() + 1 || itin.sigma[0] != 0 {
            return Err(Error::Parse("sigma must start at 0 and be one longer than iota".into()));
        }
        Ok(itin)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Evaluates an itinerary by placing generator coordinates at their shifted
/// positions and collecting the t-power to the right: `g = (∏
/// s̃_{ι(k)}^{t^{σ(k−1)}}) · t^{−σ(l)}`. Independent of plain word folding,
/// which the tests use as the oracle.
pub fn evaluate(s: &GeneratingSet, itin: &Itinerary, shape: &GroupShape) -> Result<WreathElement> {
    let mut tilde = WreathElement::identity();
    for (k, &idx) in itin.iota.iter().enumerate() {
        let gen = &s.generator(idx)?.element;
        let gen_tilde = shape.element(gen.coords().to_vec(), 0)?;
        let placed = shape.conjugate_by_t_power(&gen_tilde, itin.sigma[k])?;
        tilde = shape.multiply(&tilde, &placed)?;
    }
    shape.multiply(&tilde, &WreathElement::t_power(-*itin.sigma.last().unwrap()))
}

/// The support/insertion constants of the ambient pair `(S, u)`:
/// `C = 1 + max |supp(s)|`, `m_S = max(C, r_S)`,
/// `D = l_S(u) + 2·max{l_S(t^j) : 0 ≤ j ≤ m_S + r_S}` and
/// `D' = 6D + 2·l_S(t^{2C})`. All `l_S` values are read from an enumerated
/// ball rather than assumed multiplicative.
#[derive(Debug, Clone, Copy)]
pub struct ItineraryConstants {
    pub c: i32,
    pub r_s: i32,
    pub m_s: i32,
    pub d: u32,
    pub d_prime: u32,
    /// `l_S(t)`.
    pub l_t: u32,
}

impl ItineraryConstants {
    pub fn compute(
        shape: &GroupShape,
        s: &GeneratingSet,
        u: &HElement,
        ball: &BallIndex,
    ) -> Result<ItineraryConstants> {
        if shape.coord().is_identity(u) {
            return Err(Error::Precondition("u must be a non-identity element of H".into()));
        }
        let c = 1 + s
            .generators()
            .iter()
            .flat_map(|g| g.element.support())
            .map(|p| p.abs())
            .max()
            .unwrap_or(0);
        let r_s = s.r_s() as i32;
        if r_s == 0 {
            return Err(Error::Precondition("generating set has no t-exponent".into()));
        }
        let m_s = c.max(r_s);
        let t_len = |j: i32| -> Result<u32> {
            ball.word_length(&WreathElement::t_power(j)).ok_or(Error::InsufficientRadius {
                need: j.unsigned_abs(),
                have: ball.radius(),
            })
        };
        let mut max_t = 0;
        for j in 0..=(m_s + r_s) {
            max_t = max_t.max(t_len(j)?);
        }
        let u_elem = shape.lamp(0, u.clone())?;
        let l_u = ball
            .word_length(&u_elem)
            .ok_or(Error::InsufficientRadius { need: ball.radius() + 1, have: ball.radius() })?;
        let d = l_u + 2 * max_t;
        let d_prime = 6 * d + 2 * t_len(2 * c)?;
        Ok(ItineraryConstants { c, r_s, m_s, d, d_prime, l_t: t_len(1)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// Result of a coordinate insertion: the perturbed element, an explicit
/// word over `S` that evaluates to it (its length witnesses the bound), and
/// the outcome of the exact BFS check when the enlarged ball was available.
#[derive(Debug, Clone)]
pub struct InsertOutcome {
    pub element: WreathElement,
    pub word: Vec<u16>,
    /// `l_S(g) + D`.
    pub bound: u32,
    /// `Some(l_S(h) ≤ bound)` when the ball covers radius `bound`; `None`
    /// marks the exact check as unchecked.
    pub checked: Option<bool>,
}

fn t_witness(ball: &BallIndex, k: i32) -> Result<Vec<u16>> {
    ball.geodesic_witness(&WreathElement::t_power(k))
        .map_err(|_| Error::InsufficientRadius { need: k.unsigned_abs(), have: ball.radius() })
}

/// Splices `u^{t^{j - σ(l₁)}}` into a geodesic word at the split point
/// chosen in the style of the insertion lemma; returns the new word.
fn spliced_word(
    word: &[u16],
    itin: &Itinerary,
    l1: usize,
    j: i32,
    u_word: &[u16],
    ball: &BallIndex,
) -> Result<Vec<u16>> {
    let m = j - itin.sigma()[l1];
    let mut out = Vec::with_capacity(word.len() + u_word.len() + 2 * m.unsigned_abs() as usize);
    out.extend_from_slice(&word[..l1]);
    out.extend(t_witness(ball, -m)?);
    out.extend_from_slice(u_word);
    out.extend(t_witness(ball, m)?);
    out.extend_from_slice(&word[l1..]);
    Ok(out)
}

/// Inserts `u` into coordinate `j` of `g` on the given side:
/// `h = g·u^{t^{j+ρ(g)}}` (right, `h|_j = g|_j·u`) or `ħ = u^{t^j}·g`
/// (left, `ħ|_j = u·g|_j`); `ρ` is unchanged. Requires a geodesic witness
/// `word` of `g` and `minit − m_S ≤ j ≤ maxit + m_S`.
pub fn insert_coordinate(
    g: &WreathElement,
    word: &[u16],
    u: &HElement,
    j: i32,
    side: Side,
    s: &GeneratingSet,
    shape: &GroupShape,
    ball: &BallIndex,
    consts: &ItineraryConstants,
) -> Result<InsertOutcome> {
    if shape.kind != crate::wreath::ShapeKind::Wreath {
        return Err(Error::Precondition("coordinate insertion is defined for the wreath shape".into()));
    }
    let itin = Itinerary::of_word(s, word)?;
    if s.evaluate(shape, word)? != *g {
        return Err(Error::Precondition("witness word does not evaluate to g".into()));
    }
    if ball.word_length(g) != Some(word.len() as u32) {
        return Err(Error::Precondition("witness word is not geodesic".into()));
    }
    let m_s = consts.m_s;
    if j < itin.minit() - m_s || j > itin.maxit() + m_s {
        return Err(Error::Precondition(format!(
            "insertion position {j} outside window [{}, {}]",
            itin.minit() - m_s,
            itin.maxit() + m_s
        )));
    }

    // The lemma's coordinate table: only position j changes.
    let coord = shape.coord();
    let old = g.coordinate(j, coord);
    let new = match side {
        Side::Right => coord.multiply(&old, u)?,
        Side::Left => coord.multiply(u, &old)?,
    };
    let mut coords: Vec<(i32, HElement)> =
        g.coords().iter().filter(|(p, _)| *p != j).cloned().collect();
    coords.push((j, new));
    let element = shape.element(coords, g.rho())?;

    // The split point: for right insertion take the last itinerary point
    // within m_S of j (preferring the endpoint), for left insertion the
    // first one. Cancellation across the splice is exactly the disjoint
    // support argument, and the evaluation check below enforces it.
    let sig = itin.sigma();
    let l = itin.len();
    let l1 = match side {
        Side::Right => {
            if (j - sig[l]).abs() <= m_s {
                l
            } else {
                // One past the last admissible point, so the suffix stays
                // m_S-far from j and the splice commutes past it.
                (0..=l)
                    .rev()
                    .find(|&k| (j - sig[k]).abs() <= m_s)
                    .map(|k| k + 1)
                    .ok_or_else(|| Error::Precondition("no itinerary point within m_S of j".into()))?
            }
        }
        Side::Left => (0..=l)
            .find(|&k| (j - sig[k]).abs() <= m_s)
            .ok_or_else(|| Error::Precondition("no itinerary point within m_S of j".into()))?,
    };
    let u_elem = shape.lamp(0, u.clone())?;
    let u_word = ball
        .geodesic_witness(&u_elem)
        .map_err(|_| Error::InsufficientRadius { need: ball.radius() + 1, have: ball.radius() })?;
    let cert = spliced_word(word, &itin, l1, j, &u_word, ball)?;
    if s.evaluate(shape, &cert)? != element {
        return Err(Error::MalformedVariant("insertion certificate does not evaluate to the perturbed element".into()));
    }

    let bound = word.len() as u32 + consts.d;
    if cert.len() as u32 > bound {
        return Err(Error::MalformedVariant("insertion certificate exceeds the length bound".into()));
    }
    let checked = if ball.radius() >= bound {
        Some(ball.word_length(&element).is_some_and(|len| len <= bound))
    } else {
        None
    };
    Ok(InsertOutcome { element, word: cert, bound, checked })
}

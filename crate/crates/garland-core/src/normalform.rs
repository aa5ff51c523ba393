//! Minimal-length normal forms for base-group elements under the standard
//! generating set `S = S₀ ∪ {t, t⁻¹}`: the window `[σ⁻, σ⁺]` spanning the
//! support together with one geodesic `S₀`-word per position, plus the
//! exact length formula and the two sweep orders that realize it.

use crate::cayley::GeneratingSet;
use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

/// Position of `t` and `t⁻¹` inside a standard generating set; `S₀`
/// occupies the leading indices in coordinate-generator order.
#[derive(Debug, Clone, Copy)]
pub struct StandardLayout {
    pub s0_len: u16,
    pub t_index: u16,
    pub t_inv_index: u16,
}

/// Checks that `s` really is `S₀ ∪ {t, t⁻¹}` in the standard order and
/// returns the index layout.
pub fn standard_layout(shape: &GroupShape, s: &GeneratingSet) -> Result<StandardLayout> {
    let h_gens = shape.coord().generators();
    let expected = h_gens.len() + 2;
    if s.len() != expected {
        return Err(Error::Config(format!(
            "standard set must have |S0| + 2 = {expected} generators, found {}",
            s.len()
        )));
    }
    for (k, (_, h)) in h_gens.iter().enumerate() {
        let lamp = shape.lamp(0, h.clone())?;
        if s.generator((k + 1) as u16)?.element != lamp {
            return Err(Error::Config(format!("generator {} is not the S0 element at position 0", k + 1)));
        }
    }
    let t_index = (h_gens.len() + 1) as u16;
    let t_inv_index = (h_gens.len() + 2) as u16;
    if s.generator(t_index)?.element != WreathElement::t_power(1)
        || s.generator(t_inv_index)?.element != WreathElement::t_power(-1)
    {
        return Err(Error::Config("standard set must end with t, t^-1".into()));
    }
    Ok(StandardLayout { s0_len: h_gens.len() as u16, t_index, t_inv_index })
}

/// `σ⁻ = min(supp ∪ {0})`, `σ⁺ = max(supp ∪ {0})`, and one geodesic
/// `S₀`-word per position in the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub sigma_minus: i32,
    pub sigma_plus: i32,
    /// Geodesic `S₀`-words (1-based indices into `S₀`) for positions
    /// `σ⁻..=σ⁺` in order.
    pub words: Vec<Vec<u16>>,
}

impl NormalForm {
    pub fn word_at(&self, i: i32) -> &[u16] {
        &self.words[(i - self.sigma_minus) as usize]
    }
}

pub fn normal_form(g: &WreathElement, shape: &GroupShape) -> Result<NormalForm> {
    if !g.in_base_group() {
        return Err(Error::Precondition("normal forms are defined for ρ(g) = 0".into()));
    }
    let support = g.support();
    let sigma_minus = support.iter().copied().min().unwrap_or(0).min(0);
    let sigma_plus = support.iter().copied().max().unwrap_or(0).max(0);
    let coord = shape.coord();
    let mut words = Vec::with_capacity((sigma_plus - sigma_minus + 1) as usize);
    for i in sigma_minus..=sigma_plus {
        words.push(coord.geodesic_word(&g.coordinate(i, coord))?);
    }
    Ok(NormalForm { sigma_minus, sigma_plus, words })
}

/// The exact length formula:
/// `|σ⁻| + (σ⁺ − σ⁻) + |σ⁺| + Σ_{i=σ⁻}^{σ⁺} l_{S₀}(w_i)`.
pub fn nf_length(nf: &NormalForm) -> u64 {
    let travel = nf.sigma_minus.unsigned_abs() as u64
        + (nf.sigma_plus - nf.sigma_minus) as u64
        + nf.sigma_plus.unsigned_abs() as u64;
    travel + nf.words.iter().map(|w| w.len() as u64).sum::<u64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    /// Walk to `σ⁻`, sweep coordinates left to right, return from `σ⁺`.
    LeftFirst,
    /// Walk to `σ⁺`, sweep right to left, return from `σ⁻`.
    RightFirst,
}

/// Emits a word over the standard `S` of length exactly `nf_length(nf)`
/// that evaluates to the element.
pub fn emit_expression(nf: &NormalForm, order: SweepOrder, layout: &StandardLayout) -> Vec<u16> {
    let mut word = Vec::new();
    let t = layout.t_index;
    let t_inv = layout.t_inv_index;
    match order {
        SweepOrder::LeftFirst => {
            // t^{-σ⁻} · ∏_{i=σ⁻}^{σ⁺-1} (w_i · t^{-1}) · w_{σ⁺} · t^{σ⁺}
            word.extend(std::iter::repeat(t).take(nf.sigma_minus.unsigned_abs() as usize));
            for i in nf.sigma_minus..nf.sigma_plus {
                word.extend_from_slice(nf.word_at(i));
                word.push(t_inv);
            }
            word.extend_from_slice(nf.word_at(nf.sigma_plus));
            word.extend(std::iter::repeat(t).take(nf.sigma_plus.unsigned_abs() as usize));
        }
        SweepOrder::RightFirst => {
            // t^{-σ⁺} · ∏_{j=σ⁻}^{σ⁺-1} (w_{σ⁺+σ⁻-j} · t) · w_{σ⁻} · t^{σ⁻}
            word.extend(std::iter::repeat(t_inv).take(nf.sigma_plus.unsigned_abs() as usize));
            for j in nf.sigma_minus..nf.sigma_plus {
                word.extend_from_slice(nf.word_at(nf.sigma_plus + nf.sigma_minus - j));
                word.push(t);
            }
            word.extend_from_slice(nf.word_at(nf.sigma_minus));
            word.extend(std::iter::repeat(t_inv).take(nf.sigma_minus.unsigned_abs() as usize));
        }
    }
    word
}

/// Membership in `R_q(n)`'s window criterion: `−q ≤ σ⁻ ≤ σ⁺ ≤ q`.
pub fn sigma_window_membership(g: &WreathElement, q: f64) -> Result<bool> {
    if !g.in_base_group() {
        return Err(Error::Precondition("σ-window membership needs ρ(g) = 0".into()));
    }
    let support = g.support();
    let sigma_minus = support.iter().copied().min().unwrap_or(0).min(0);
    let sigma_plus = support.iter().copied().max().unwrap_or(0).max(0);
    Ok(-q <= sigma_minus as f64 && (sigma_plus as f64) <= q)
}

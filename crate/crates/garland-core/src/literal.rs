//! Element literals: `"a@4 t^-3"` is the element with coordinate `a` at
//! position 4 and `ρ = -3`. A literal is a whitespace-separated product of
//! atoms, evaluated left to right:
//!
//! * `VALUE@POS` — the base-group element `VALUE` placed at position `POS`
//!   (`VALUE` is a generator label, optionally powered: `a^-1`, `x^2`, or a
//!   `*`-separated product of such);
//! * `t` / `t^K` — a power of the top generator;
//! * `1` or `e` — the identity.
//!
//! Printing produces the sorted coordinate atoms followed by the t-power;
//! parse ∘ print is the identity on canonical elements.

use crate::coordgroup::HElement;
use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

fn parse_value(shape: &GroupShape, value: &str) -> Result<HElement> {
    let mut acc = shape.coord().identity();
    for part in value.split('*') {
        let h = shape.coord().element_from_value(part)?;
        acc = shape.coord().multiply(&acc, &h)?;
    }
    Ok(acc)
}

pub fn parse_element(shape: &GroupShape, literal: &str) -> Result<WreathElement> {
    let mut acc = WreathElement::identity();
    for token in literal.split_whitespace() {
        let atom = if token == "1" || token == "e" {
            WreathElement::identity()
        } else if token == "t" {
            WreathElement::t_power(1)
        } else if let Some(exp) = token.strip_prefix("t^") {
            let k: i32 = exp.parse().map_err(|_| Error::Parse(format!("bad t-power {token}")))?;
            WreathElement::t_power(k)
        } else if let Some((value, pos)) = token.rsplit_once('@') {
            let p: i32 = pos.parse().map_err(|_| Error::Parse(format!("bad position in {token}")))?;
            let v = parse_value(shape, value)?;
            shape.lamp(p, v)?
        } else {
            return Err(Error::Parse(format!("unrecognized atom {token}")));
        };
        acc = shape.multiply(&acc, &atom)?;
    }
    Ok(acc)
}

pub fn print_element(shape: &GroupShape, g: &WreathElement) -> String {
    if g.is_identity() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = g
        .coords()
        .iter()
        .map(|(p, v)| format!("{}@{}", shape.coord().value_to_string(v), p))
        .collect();
    if g.rho() != 0 {
        parts.push(format!("t^{}", g.rho()));
    }
    parts.join(" ")
}

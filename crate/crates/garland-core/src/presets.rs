//! Named group/generating-set presets used by the CLI and the test suites.

use crate::cayley::{Generator, GeneratingSet};
use crate::coordgroup::{CoordinateGroup, HElement};
use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

/// `S = S₀ ∪ {t, t⁻¹}`: the coordinate-group generators embedded at
/// position 0, followed by `t` and `t⁻¹`.
pub fn standard_set(shape: &GroupShape) -> Result<GeneratingSet> {
    let mut gens = Vec::new();
    for (label, h) in shape.coord().generators() {
        gens.push(Generator {
            label: label.clone(),
            element: shape.lamp(0, h.clone())?,
        });
    }
    gens.push(Generator { label: "t".into(), element: WreathElement::t_power(1) });
    gens.push(Generator { label: "t^-1".into(), element: WreathElement::t_power(-1) });
    GeneratingSet::new(shape, gens)
}

/// `C₂ ≀ ⟨t⟩` with `S = {a, t, t⁻¹}`.
pub fn lamplighter() -> Result<(GroupShape, GeneratingSet)> {
    let shape = GroupShape::wreath(CoordinateGroup::cyclic(2)?);
    let s = standard_set(&shape)?;
    Ok((shape, s))
}

/// `C₃ ≀ ⟨t⟩` with `S = {a, a⁻¹, t, t⁻¹}`.
pub fn lamplighter3() -> Result<(GroupShape, GeneratingSet)> {
    let shape = GroupShape::wreath(CoordinateGroup::cyclic(3)?);
    let s = standard_set(&shape)?;
    Ok((shape, s))
}

/// `F₂ × ⟨t⟩` with `S = {x, y, t}` symmetrized: the density-one-half
/// counterexample group.
pub fn example15() -> Result<(GroupShape, GeneratingSet)> {
    let shape = GroupShape::direct(CoordinateGroup::free(2)?);
    let s = standard_set(&shape)?;
    Ok((shape, s))
}

/// The five-generator lamplighter set of the worked itinerary example:
/// `s1 = a@4 t^-3, s2 = t^-2, s3 = s1⁻¹, s4 = s2⁻¹, s5 = a@0`.
pub fn paper_s5() -> Result<(GroupShape, GeneratingSet)> {
    let shape = GroupShape::wreath(CoordinateGroup::cyclic(2)?);
    let a = HElement::Finite(1);
    let gens = vec![
        Generator { label: "s1".into(), element: shape.element(vec![(4, a.clone())], -3)? },
        Generator { label: "s2".into(), element: WreathElement::t_power(-2) },
        Generator { label: "s3".into(), element: shape.element(vec![(1, a.clone())], 3)? },
        Generator { label: "s4".into(), element: WreathElement::t_power(2) },
        Generator { label: "s5".into(), element: shape.element(vec![(0, a)], 0)? },
    ];
    let s = GeneratingSet::new(&shape, gens)?;
    Ok((shape, s))
}

pub const PRESET_NAMES: &[&str] = &["lamplighter", "lamplighter3", "example15", "paper-S5"];

pub fn by_name(name: &str) -> Result<(GroupShape, GeneratingSet)> {
    match name {
        "lamplighter" => lamplighter(),
        "lamplighter3" => lamplighter3(),
        "example15" => example15(),
        "paper-S5" | "paper-s5" => paper_s5(),
        other => Err(Error::Config(format!(
            "unknown preset {other}; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

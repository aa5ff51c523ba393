//! Ball cache files: one line-based record per element
//! `{canonical key, length, parent, generator}`, keyed on disk by the group
//! spec digest and the radius.
//!
//! Format:
//!
//! ```text
//! garland-ball v1
//! digest <hex>
//! radius <n>
//! spheres <s0> <s1> … <sn>
//! elements <count>
//! <key-hex> <length> <parent> <generator>
//! …
//! ```

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::cayley::BallIndex;
use crate::wreath::WreathElement;
use crate::{Error, Result};

pub fn write_ball<W: Write>(ball: &BallIndex, digest: &str, mut out: W) -> Result<()> {
    writeln!(out, "garland-ball v1")?;
    writeln!(out, "digest {digest}")?;
    writeln!(out, "radius {}", ball.radius())?;
    let spheres: Vec<String> = ball.sphere_sizes().iter().map(|s| s.to_string()).collect();
    writeln!(out, "spheres {}", spheres.join(" "))?;
    writeln!(out, "elements {}", ball.len())?;
    for idx in 0..ball.len() as u32 {
        writeln!(
            out,
            "{} {} {} {}",
            hex::encode(ball.element(idx).canonical_key()),
            ball.length_of_index(idx),
            ball.parent_of(idx),
            ball.generator_used(idx),
        )?;
    }
    Ok(())
}

pub fn read_ball<R: BufRead>(input: R) -> Result<(String, BallIndex)> {
    let mut lines = input.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Parse("truncated ball cache".into()))
    };
    if next()? != "garland-ball v1" {
        return Err(Error::Parse("not a garland ball cache".into()));
    }
    let digest_line = next()?;
    let digest = digest_line
        .strip_prefix("digest ")
        .ok_or_else(|| Error::Parse("missing digest line".into()))?
        .to_string();
    let radius: u32 = next()?
        .strip_prefix("radius ")
        .ok_or_else(|| Error::Parse("missing radius line".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad radius".into()))?;
    let spheres_line = next()?;
    let spheres: Vec<u64> = spheres_line
        .strip_prefix("spheres ")
        .ok_or_else(|| Error::Parse("missing spheres line".into()))?
        .split_whitespace()
        .map(|v| v.parse().map_err(|_| Error::Parse("bad sphere size".into())))
        .collect::<Result<_>>()?;
    let count: usize = next()?
        .strip_prefix("elements ")
        .ok_or_else(|| Error::Parse("missing elements line".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad element count".into()))?;

    let mut elements = Vec::with_capacity(count);
    let mut lengths = Vec::with_capacity(count);
    let mut parents = Vec::with_capacity(count);
    let mut gens = Vec::with_capacity(count);
    for _ in 0..count {
        let line = next()?;
        let mut parts = line.split_whitespace();
        let key = parts.next().ok_or_else(|| Error::Parse("missing key".into()))?;
        let bytes = hex::decode(key).map_err(|_| Error::Parse("bad key hex".into()))?;
        elements.push(WreathElement::from_canonical_key(&bytes)?);
        let mut field = |name: &str| -> Result<u64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {name}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {name}")))
        };
        lengths.push(field("length")? as u32);
        parents.push(field("parent")? as u32);
        gens.push(field("generator")? as u16);
    }
    let ball = BallIndex::from_parts(radius, elements, lengths, parents, gens, spheres)?;
    Ok((digest, ball))
}

/// Directory of ball cache files keyed by `(spec digest, radius)`.
#[derive(Debug, Clone)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> BallCache {
        BallCache { dir: dir.into() }
    }

    pub fn path_for(&self, digest: &str, radius: u32) -> PathBuf {
        self.dir.join(format!("ball-{digest}-{radius}.txt"))
    }

    pub fn store(&self, ball: &BallIndex, digest: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(digest, ball.radius());
        let tmp = path.with_extension("tmp");
        let file = fs::File::create(&tmp)?;
        write_ball(ball, digest, BufWriter::new(file))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads the cached ball of exactly this radius, if present and
    /// well-formed for the digest.
    pub fn load(&self, digest: &str, radius: u32) -> Result<Option<BallIndex>> {
        let path = self.path_for(digest, radius);
        if !path.exists() {
            return Ok(None);
        }
        let (stored, ball) = read_ball(BufReader::new(fs::File::open(&path)?))?;
        if stored != digest || ball.radius() != radius {
            return Err(Error::Parse(format!("cache file {} does not match its key", path.display())));
        }
        Ok(Some(ball))
    }

    /// The largest cached radius at least `min_radius` for this digest.
    pub fn best_radius(&self, digest: &str, min_radius: u32) -> Option<u32> {
        let prefix = format!("ball-{digest}-");
        let mut best = None;
        let entries = fs::read_dir(&self.dir).ok()?;
        for entry in entries.flatten() {
            let name = entry.file_name();
            let name = name.to_string_lossy();
            if let Some(rest) = name.strip_prefix(&prefix) {
                if let Some(radius) = rest.strip_suffix(".txt").and_then(|r| r.parse::<u32>().ok()) {
                    if radius >= min_radius && best.is_none_or(|b| radius > b) {
                        best = Some(radius);
                    }
                }
            }
        }
        best
    }
}

pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("GARLAND_CACHE_DIR").map(PathBuf::from)
}

pub fn default_cache_dir(out_dir: &Path) -> PathBuf {
    cache_dir_from_env().unwrap_or_else(|| out_dir.join("cache"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::presets;

    #[test]
    fn ball_survives_a_cache_round_trip() {
        let (shape, s) = presets::lamplighter().unwrap();
        let ball = enumerate_ball(&shape, &s, 7, 1_000_000).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        cache.store(&ball, "abc123").unwrap();
        let loaded = cache.load("abc123", 7).unwrap().expect("cache hit");
        assert_eq!(loaded.len(), ball.len());
        assert_eq!(loaded.ball_sizes(), ball.ball_sizes());
        for idx in 0..ball.len() as u32 {
            assert_eq!(loaded.element(idx), ball.element(idx));
            assert_eq!(loaded.witness_by_index(idx), ball.witness_by_index(idx));
        }
        assert_eq!(cache.best_radius("abc123", 3), Some(7));
        assert_eq!(cache.best_radius("abc123", 9), None);
        assert!(cache.load("other", 7).unwrap().is_none());
    }
}

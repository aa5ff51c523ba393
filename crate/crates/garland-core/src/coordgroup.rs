//! The coordinate group `H` with its symmetric generating set `S₀`.
//!
//! Four kinds are supported: finite cyclic groups, finite groups given by a
//! multiplication table, finitely generated free groups, and the integers.
//! Elements are stored canonically (ids, reduced words, integers), so
//! structural equality is group equality. Finite kinds precompute the full
//! geodesic-length array at construction time.

use std::collections::VecDeque;
use std::fmt;

use crate::{Error, Result};

/// A canonical element of the coordinate group.
///
/// * `Finite(id)` — cyclic residue or table element id;
/// * `Word(w)` — reduced word over free letters, `+k`/`-k` for the k-th
///   letter and its inverse (1-based);
/// * `Int(n)` — an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HElement {
    Finite(u32),
    Word(Vec<i8>),
    Int(i64),
}

impl HElement {
    /// Stable byte encoding used inside canonical keys of wreath elements.
    pub fn encode(&self, out: &mut Vec<u8>) {
        match self {
            HElement::Finite(id) => {
                out.push(b'F');
                out.extend_from_slice(&id.to_le_bytes());
            }
            HElement::Word(w) => {
                out.push(b'W');
                out.extend_from_slice(&(w.len() as u32).to_le_bytes());
                out.extend(w.iter().map(|&l| l as u8));
            }
            HElement::Int(n) => {
                out.push(b'I');
                out.extend_from_slice(&n.to_le_bytes());
            }
        }
    }

    pub(crate) fn decode(bytes: &[u8], pos: &mut usize) -> Result<HElement> {
        let bad = || Error::Parse("truncated element encoding".into());
        let tag = *bytes.get(*pos).ok_or_else(bad)?;
        *pos += 1;
        match tag {
            b'F' => {
                let raw = bytes.get(*pos..*pos + 4).ok_or_else(bad)?;
                *pos += 4;
                Ok(HElement::Finite(u32::from_le_bytes(raw.try_into().unwrap())))
            }
            b'W' => {
                let raw = bytes.get(*pos..*pos + 4).ok_or_else(bad)?;
                *pos += 4;
                let len = u32::from_le_bytes(raw.try_into().unwrap()) as usize;
                let raw = bytes.get(*pos..*pos + len).ok_or_else(bad)?;
                *pos += len;
                Ok(HElement::Word(raw.iter().map(|&b| b as i8).collect()))
            }
            b'I' => {
                let raw = bytes.get(*pos..*pos + 8).ok_or_else(bad)?;
                *pos += 8;
                Ok(HElement::Int(i64::from_le_bytes(raw.try_into().unwrap())))
            }
            _ => Err(Error::Parse(format!("unknown element tag {tag}"))),
        }
    }
}

/// Finite group given by an explicit multiplication table.
#[derive(Debug, Clone)]
pub struct TableData {
    pub names: Vec<String>,
    /// Row-major table: `mul[i * n + j]` is the id of `elements[i] * elements[j]`.
    pub mul: Vec<u32>,
    pub inv: Vec<u32>,
    pub identity: u32,
}

#[derive(Debug, Clone)]
pub enum CoordKind {
    Cyclic { m: u32 },
    Table(TableData),
    Free { rank: u32 },
    Integers,
}

/// The group `H` together with its ordered symmetric generating set `S₀`.
///
/// Immutable after construction; all operations are read-only and the value
/// is safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct CoordinateGroup {
    kind: CoordKind,
    generators: Vec<(String, HElement)>,
    /// Geodesic length per element id, precomputed for finite kinds.
    lengths: Option<Vec<u32>>,
}

const DEFAULT_ELEMENT_CAP: u64 = 10_000_000;

fn free_letter_names(rank: u32) -> Vec<String> {
    let base = ["x", "y", "z", "w"];
    (0..rank)
        .map(|k| {
            if rank as usize <= base.len() {
                base[k as usize].to_string()
            } else {
                format!("g{}", k + 1)
            }
        })
        .collect()
}

fn reduce_concat(a: &[i8], b: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    for &l in b {
        if out.last().is_some_and(|&t| t == -l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl CoordinateGroup {
    pub fn cyclic(m: u32) -> Result<CoordinateGroup> {
        if m == 0 {
            return Err(Error::Config("cyclic order must be positive".into()));
        }
        let mut generators = Vec::new();
        if m > 1 {
            generators.push(("a".to_string(), HElement::Finite(1)));
            if m > 2 {
                generators.push(("a^-1".to_string(), HElement::Finite(m - 1)));
            }
        }
        let mut group = CoordinateGroup {
            kind: CoordKind::Cyclic { m },
            generators,
            lengths: None,
        };
        group.lengths = Some(group.bfs_lengths(m as usize)?);
        Ok(group)
    }

    pub fn free(rank: u32) -> Result<CoordinateGroup> {
        if rank == 0 || rank > 120 {
            return Err(Error::Config("free rank must be in 1..=120".into()));
        }
        let names = free_letter_names(rank);
        let mut generators = Vec::new();
        for (k, name) in names.iter().enumerate() {
            let letter = (k + 1) as i8;
            generators.push((name.clone(), HElement::Word(vec![letter])));
            generators.push((format!("{name}^-1"), HElement::Word(vec![-letter])));
        }
        Ok(CoordinateGroup {
            kind: CoordKind::Free { rank },
            generators,
            lengths: None,
        })
    }

    pub fn integers() -> CoordinateGroup {
        CoordinateGroup {
            kind: CoordKind::Integers,
            generators: vec![
                ("a".to_string(), HElement::Int(1)),
                ("a^-1".to_string(), HElement::Int(-1)),
            ],
            lengths: None,
        }
    }

    /// Builds a table-backed group, validating the table and the generators.
    ///
    /// The table must be a Latin square with a two-sided identity, closed
    /// under inverses and associative; the generating set is symmetrized and
    /// must generate the whole group.
    pub fn table(names: Vec<String>, table: Vec<Vec<u32>>, generator_names: &[String]) -> Result<CoordinateGroup> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Config("multiplication table must be square and nonempty".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for row in &table {
            for &v in row {
                if v as usize >= n {
                    return Err(Error::Config(format!("table entry {v} out of range")));
                }
                mul.push(v);
            }
        }
        // Latin square: every row and column is a permutation.
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                seen_row[mul[i * n + j] as usize] = true;
                seen_col[mul[j * n + i] as usize] = true;
            }
            if seen_row.iter().any(|&s| !s) || seen_col.iter().any(|&s| !s) {
                return Err(Error::Config(format!("table is not a Latin square at row/col {i}")));
            }
        }
        let identity = (0..n as u32)
            .find(|&e| (0..n as u32).all(|x| mul[(e as usize) * n + x as usize] == x && mul[(x as usize) * n + e as usize] == x))
            .ok_or_else(|| Error::Config("table has no two-sided identity".into()))?;
        let mut inv = vec![u32::MAX; n];
        for i in 0..n {
            for j in 0..n {
                if mul[i * n + j] == identity && mul[j * n + i] == identity {
                    inv[i] = j as u32;
                }
            }
        }
        if inv.iter().any(|&v| v == u32::MAX) {
            return Err(Error::Config("table element without inverse".into()));
        }
        // Associativity: full triple scan for small tables, sampled otherwise.
        let full = n * n * n <= 20_000_000;
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if full {
            Box::new((0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))))
        } else {
            let mut state = 0x9e3779b97f4a7c15u64;
            Box::new((0..100_000).map(move |_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (state >> 33) as usize % n;
                let b = (state >> 17) as usize % n;
                let c = state as usize % n;
                (a, b, c)
            }))
        };
        for (a, b, c) in triples {
            let left = mul[mul[a * n + b] as usize * n + c];
            let right = mul[a * n + mul[b * n + c] as usize];
            if left != right {
                return Err(Error::Config(format!("table is not associative at ({a},{b},{c})")));
            }
        }

        let mut gen_ids = Vec::new();
        for gname in generator_names {
            let id = names
                .iter()
                .position(|m| m == gname)
                .ok_or_else(|| Error::Config(format!("unknown generator name {gname}")))? as u32;
            if !gen_ids.contains(&id) {
                gen_ids.push(id);
            }
            let iid = inv[id as usize];
            if !gen_ids.contains(&iid) {
                gen_ids.push(iid);
            }
        }
        gen_ids.retain(|&id| id != identity);
        if gen_ids.is_empty() && n > 1 {
            return Err(Error::Config("table group needs at least one non-identity generator".into()));
        }
        let generators = gen_ids
            .iter()
            .map(|&id| (names[id as usize].clone(), HElement::Finite(id)))
            .collect();
        let data = TableData { names, mul, inv, identity };
        let mut group = CoordinateGroup {
            kind: CoordKind::Table(data),
            generators,
            lengths: None,
        };
        let lengths = group.bfs_lengths(n)?;
        if lengths.iter().any(|&l| l == u32::MAX) {
            return Err(Error::Config("generators do not generate the whole table group".into()));
        }
        group.lengths = Some(lengths);
        Ok(group)
    }

    /// BFS over element ids; distance table from the identity.
    fn bfs_lengths(&self, n: usize) -> Result<Vec<u32>> {
        let mut dist = vec![u32::MAX; n.max(1)];
        let start = self.identity_id();
        dist[start as usize] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[cur as usize];
            for (_, g) in &self.generators {
                let HElement::Finite(gid) = g else { unreachable!() };
                let next = self.mul_ids(cur, *gid);
                if dist[next as usize] == u32::MAX {
                    dist[next as usize] = d + 1;
                    queue.push_back(next);
                }
            }
        }
        Ok(dist)
    }

    fn identity_id(&self) -> u32 {
        match &self.kind {
            CoordKind::Cyclic { .. } => 0,
            CoordKind::Table(t) => t.identity,
            _ => unreachable!("identity_id is only defined for finite kinds"),
        }
    }

    fn mul_ids(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            CoordKind::Cyclic { m } => (a + b) % m,
            CoordKind::Table(t) => t.mul[a as usize * t.names.len() + b as usize],
            _ => unreachable!(),
        }
    }

    pub fn kind(&self) -> &CoordKind {
        &self.kind
    }

    /// The ordered symmetric generating set `S₀` as labeled elements.
    pub fn generators(&self) -> &[(String, HElement)] {
        &self.generators
    }

    pub fn identity(&self) -> HElement {
        match &self.kind {
            CoordKind::Cyclic { .. } | CoordKind::Table(_) => HElement::Finite(self.identity_id()),
            CoordKind::Free { .. } => HElement::Word(Vec::new()),
            CoordKind::Integers => HElement::Int(0),
        }
    }

    pub fn is_identity(&self, a: &HElement) -> bool {
        *a == self.identity()
    }

    fn check_valid(&self, a: &HElement) -> Result<()> {
        let ok = match (&self.kind, a) {
            (CoordKind::Cyclic { m }, HElement::Finite(id)) => id < m,
            (CoordKind::Table(t), HElement::Finite(id)) => (*id as usize) < t.names.len(),
            (CoordKind::Free { rank }, HElement::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as u32 <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (CoordKind::Integers, HElement::Int(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{a:?} is not valid in this group")))
        }
    }

    /// Canonical product `a * b`.
    pub fn multiply(&self, a: &HElement, b: &HElement) -> Result<HElement> {
        self.check_valid(a)?;
        self.check_valid(b)?;
        Ok(match (&self.kind, a, b) {
            (CoordKind::Cyclic { .. } | CoordKind::Table(_), HElement::Finite(x), HElement::Finite(y)) => {
                HElement::Finite(self.mul_ids(*x, *y))
            }
            (CoordKind::Free { .. }, HElement::Word(x), HElement::Word(y)) => HElement::Word(reduce_concat(x, y)),
            (CoordKind::Integers, HElement::Int(x), HElement::Int(y)) => HElement::Int(x + y),
            _ => unreachable!(),
        })
    }

    pub fn inverse(&self, a: &HElement) -> Result<HElement> {
        self.check_valid(a)?;
        Ok(match (&self.kind, a) {
            (CoordKind::Cyclic { m }, HElement::Finite(x)) => HElement::Finite((m - x) % m),
            (CoordKind::Table(t), HElement::Finite(x)) => HElement::Finite(t.inv[*x as usize]),
            (CoordKind::Free { .. }, HElement::Word(w)) => HElement::Word(w.iter().rev().map(|&l| -l).collect()),
            (CoordKind::Integers, HElement::Int(x)) => HElement::Int(-x),
            _ => unreachable!(),
        })
    }

    /// Geodesic length `l_{S₀}(a)`: table lookup for finite kinds, reduced
    /// word length for free groups, absolute value for the integers.
    pub fn geodesic_length(&self, a: &HElement) -> Result<u32> {
        self.check_valid(a)?;
        Ok(match (&self.kind, a) {
            (CoordKind::Cyclic { .. } | CoordKind::Table(_), HElement::Finite(id)) => {
                self.lengths.as_ref().expect("finite kinds precompute lengths")[*id as usize]
            }
            (CoordKind::Free { .. }, HElement::Word(w)) => w.len() as u32,
            (CoordKind::Integers, HElement::Int(x)) => x.unsigned_abs().min(u32::MAX as u64) as u32,
            _ => unreachable!(),
        })
    }

    /// The exact ball `B_{H,S₀}(n)`, in a deterministic order.
    pub fn ball(&self, n: u32) -> Result<Vec<HElement>> {
        self.ball_capped(n, DEFAULT_ELEMENT_CAP)
    }

    pub fn ball_capped(&self, n: u32, cap: u64) -> Result<Vec<HElement>> {
        match &self.kind {
            CoordKind::Cyclic { m } => Ok((0..*m)
                .map(HElement::Finite)
                .filter(|e| self.geodesic_length(e).unwrap() <= n)
                .collect()),
            CoordKind::Table(t) => Ok((0..t.names.len() as u32)
                .map(HElement::Finite)
                .filter(|e| self.geodesic_length(e).unwrap() <= n)
                .collect()),
            CoordKind::Integers => {
                let n = n as i64;
                if 2 * n as u64 + 1 > cap {
                    return Err(Error::CapExceeded { cap, last_radius: ((cap as u32).saturating_sub(1)) / 2 });
                }
                Ok((-n..=n).map(HElement::Int).collect())
            }
            CoordKind::Free { rank } => {
                let mut out = vec![HElement::Word(Vec::new())];
                let mut frontier = vec![Vec::<i8>::new()];
                for radius in 1..=n {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for k in 1..=*rank as i8 {
                            for letter in [k, -k] {
                                if w.last().is_some_and(|&t| t == -letter) {
                                    continue;
                                }
                                let mut nw = w.clone();
                                nw.push(letter);
                                next.push(nw);
                            }
                        }
                    }
                    if out.len() as u64 + next.len() as u64 > cap {
                        return Err(Error::CapExceeded { cap, last_radius: radius - 1 });
                    }
                    out.extend(next.iter().cloned().map(HElement::Word));
                    frontier = next;
                }
                Ok(out)
            }
        }
    }

    /// All elements of a finite kind; errors for infinite kinds.
    pub fn all_elements(&self) -> Result<Vec<HElement>> {
        match &self.kind {
            CoordKind::Cyclic { m } => Ok((0..*m).map(HElement::Finite).collect()),
            CoordKind::Table(t) => Ok((0..t.names.len() as u32).map(HElement::Finite).collect()),
            _ => Err(Error::Config("group is infinite".into())),
        }
    }

    /// Lexicographically least geodesic word over `S₀` (1-based generator
    /// indices) for `a`, obtained greedily from the length tables.
    pub fn geodesic_word(&self, a: &HElement) -> Result<Vec<u16>> {
        self.check_valid(a)?;
        let mut word = Vec::new();
        let mut cur = a.clone();
        let mut remaining = self.geodesic_length(&cur)?;
        while remaining > 0 {
            let mut advanced = false;
            for (idx, (_, s)) in self.generators.iter().enumerate() {
                // cur = s * rest  <=>  rest = s^-1 * cur
                let rest = self.multiply(&self.inverse(s)?, &cur)?;
                if self.geodesic_length(&rest)? == remaining - 1 {
                    word.push((idx + 1) as u16);
                    cur = rest;
                    remaining -= 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Err(Error::InvalidElement("element not generated by S0".into()));
            }
        }
        Ok(word)
    }

    /// Looks up a generator-or-power literal like `a`, `a^-1`, `x^2`, `e`.
    pub fn element_from_value(&self, value: &str) -> Result<HElement> {
        let value = value.trim();
        if value == "1" || value == "e" {
            return Ok(self.identity());
        }
        let (base, power) = match value.split_once('^') {
            Some((b, p)) => (
                b,
                p.parse::<i64>().map_err(|_| Error::Parse(format!("bad power in {value}")))?,
            ),
            None => (value, 1),
        };
        let base_el = if let Some((_, el)) = self.generators.iter().find(|(n, _)| n == base) {
            el.clone()
        } else if let CoordKind::Table(t) = &self.kind {
            let id = t
                .names
                .iter()
                .position(|n| n == base)
                .ok_or_else(|| Error::Parse(format!("unknown element {base}")))? as u32;
            HElement::Finite(id)
        } else {
            return Err(Error::Parse(format!("unknown generator {base}")));
        };
        let mut out = self.identity();
        let step = if power >= 0 { base_el } else { self.inverse(&base_el)? };
        for _ in 0..power.unsigned_abs() {
            out = self.multiply(&out, &step)?;
        }
        Ok(out)
    }

    /// Short display form for an element, parseable by [`Self::element_from_value`].
    pub fn value_to_string(&self, a: &HElement) -> String {
        match (&self.kind, a) {
            (_, e) if self.is_identity(e) => "e".to_string(),
            (CoordKind::Cyclic { .. }, HElement::Finite(id)) => {
                if *id == 1 {
                    "a".to_string()
                } else {
                    format!("a^{id}")
                }
            }
            (CoordKind::Table(t), HElement::Finite(id)) => t.names[*id as usize].clone(),
            (CoordKind::Free { rank }, HElement::Word(w)) => {
                let names = free_letter_names(*rank);
                w.iter()
                    .map(|&l| {
                        let name = &names[(l.unsigned_abs() - 1) as usize];
                        if l > 0 {
                            name.clone()
                        } else {
                            format!("{name}^-1")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            }
            (CoordKind::Integers, HElement::Int(n)) => format!("a^{n}"),
            _ => "?".to_string(),
        }
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HElement::Finite(id) => write!(f, "#{id}"),
            HElement::Word(w) => write!(f, "w{w:?}"),
            HElement::Int(n) => write!(f, "{n}"),
        }
    }
}

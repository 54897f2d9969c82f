//! Finite-truncation data model of a topological Ramsey space.
//!
//! The maximal element `U` is truncated to finitely many levels. A finite
//! reduct is stored as the approximation it induces at the end of the
//! truncation, so [`Reduct`] and [`Approximation`] share one representation:
//! `r_n(X)` is simply the first `n` blocks of `X`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global ground-element identifier.
pub type Atom = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Ellentuck,
    Fin,
    Tree,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            InstanceKind::Ellentuck => "ellentuck",
            InstanceKind::Fin => "fin",
            InstanceKind::Tree => "tree",
        };
        f.write_str(name)
    }
}

/// One level `U(n)` of the ground space; `index` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub index: usize,
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSpace {
    pub kind: InstanceKind,
    pub levels: Vec<Level>,
}

impl GroundSpace {
    /// Builds a ground space from raw atom lists; levels must be nonempty and
    /// pairwise disjoint.
    pub fn new(kind: InstanceKind, raw: Vec<Vec<Atom>>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Parameter("a ground space needs at least one level".into()));
        }
        let mut seen = BTreeSet::new();
        let mut levels = Vec::with_capacity(raw.len());
        for (i, mut atoms) in raw.into_iter().enumerate() {
            atoms.sort_unstable();
            atoms.dedup();
            if atoms.is_empty() {
                return Err(Error::Parameter(format!("level {} is empty", i + 1)));
            }
            for &a in &atoms {
                if !seen.insert(a) {
                    return Err(Error::Parameter(format!("atom {a} appears in two levels")));
                }
            }
            levels.push(Level { index: i + 1, atoms });
        }
        Ok(GroundSpace { kind, levels })
    }

    /// The truncation depth `N`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// 1-based level holding `atom`, if any.
    pub fn level_of(&self, atom: Atom) -> Option<usize> {
        self.levels
            .iter()
            .find(|l| l.atoms.binary_search(&atom).is_ok())
            .map(|l| l.index)
    }

    /// Atoms of the slice `U[k,l)`.
    pub fn slice(&self, start: usize, end: usize) -> Vec<Atom> {
        self.levels
            .iter()
            .filter(|l| l.index >= start && l.index < end)
            .flat_map(|l| l.atoms.iter().copied())
            .collect()
    }

    /// Stable digest of the level structure, embedded in reports.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.kind.to_string().as_bytes());
        for l in &self.levels {
            h.update(b"|");
            for a in &l.atoms {
                h.update(a.to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// Half-open interval `[start, end)` of 1-based level indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelInterval {
    pub start: usize,
    pub end: usize,
}

impl LevelInterval {
    pub fn new(start: usize, end: usize) -> Self {
        LevelInterval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The material `X(n)` added by one step of an approximation. Atoms are kept
/// sorted; the source interval records which levels of `U` were used.
///
/// Blocks are totally ordered by their atom lists first, which is the order
/// every deterministic search in this crate uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    atoms: Vec<Atom>,
    source: LevelInterval,
}

impl Block {
    pub fn new(mut atoms: Vec<Atom>, source: LevelInterval) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        Block { atoms, source }
    }

    /// Builds a block and derives its source interval from `ground`.
    pub fn from_atoms(ground: &GroundSpace, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("blocks must be nonempty".into()));
        }
        let mut lo = usize::MAX;
        let mut hi = 0;
        for &a in &atoms {
            let l = ground
                .level_of(a)
                .ok_or_else(|| Error::Parameter(format!("atom {a} is not in the ground space")))?;
            lo = lo.min(l);
            hi = hi.max(l);
        }
        Ok(Block::new(atoms, LevelInterval::new(lo, hi + 1)))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn source(&self) -> LevelInterval {
        self.source
    }

    pub fn least(&self) -> Atom {
        self.atoms[0]
    }

    pub fn greatest(&self) -> Atom {
        *self.atoms.last().expect("blocks are nonempty")
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// An element of `AU`: a finite sequence of blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Approximation {
    blocks: Vec<Block>,
}

/// A finite reduct `X ≤ U`, represented by its longest approximation.
pub type Reduct = Approximation;

impl Approximation {
    pub fn empty() -> Self {
        Approximation { blocks: Vec::new() }
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Self {
        Approximation { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn last(&self) -> Option<&Block> {
        self.blocks.last()
    }

    /// `r_n` of this sequence, without range checking beyond clamping.
    pub fn prefix(&self, n: usize) -> Approximation {
        Approximation {
            blocks: self.blocks[..n.min(self.blocks.len())].to_vec(),
        }
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &Approximation) -> bool {
        self.len() <= other.len() && other.blocks[..self.len()] == self.blocks[..]
    }

    pub fn extended(&self, block: Block) -> Approximation {
        let mut blocks = self.blocks.clone();
        blocks.push(block);
        Approximation { blocks }
    }

    /// All atoms used, sorted.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self.blocks.iter().flat_map(|b| b.atoms.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.blocks.iter().map(Block::greatest).max()
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DepthValue {
    Finite(usize),
    Infinite,
}

/// Selection operators making up the instance-declared inner families.
///
/// `Keep`, `Identity` and `Full` all return the whole new block; they are
/// kept apart so each instance reports its family in its own vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Drop,
    Keep,
    Min,
    Max,
    MinMax,
    Identity,
    Full,
}

impl Selector {
    pub fn apply(&self, block: &Block) -> Vec<Atom> {
        match self {
            Selector::Drop => Vec::new(),
            Selector::Keep | Selector::Identity | Selector::Full => block.atoms().to_vec(),
            Selector::Min => vec![block.least()],
            Selector::Max => vec![block.greatest()],
            Selector::MinMax => {
                let (lo, hi) = (block.least(), block.greatest());
                if lo == hi {
                    vec![lo]
                } else {
                    vec![lo, hi]
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Selector::Drop => "drop",
            Selector::Keep => "keep",
            Selector::Min => "min",
            Selector::Max => "max",
            Selector::MinMax => "minmax",
            Selector::Identity => "identity",
            Selector::Full => "full",
        }
    }

    pub fn parse(name: &str) -> Option<Selector> {
        Some(match name {
            "drop" => Selector::Drop,
            "keep" => Selector::Keep,
            "min" => Selector::Min,
            "max" => Selector::Max,
            "minmax" => Selector::MinMax,
            "identity" => Selector::Identity,
            "full" => Selector::Full,
            _ => return None,
        })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Instance callbacks. Implementations must make `leq_fin_core` a quasi-order
/// with finite predecessor sets; everything else is derived from these.
pub trait SpaceModel: Send + Sync {
    fn kind(&self) -> InstanceKind;

    fn ground(&self) -> &GroundSpace;

    /// The maximal element `U` of the truncation.
    fn top(&self) -> Reduct;

    fn block_valid(&self, block: &Block) -> bool;

    /// Whether `s` is an element of `AU`.
    fn is_approximation(&self, s: &Approximation) -> bool;

    fn leq_fin_core(&self, s: &Approximation, t: &Approximation) -> bool;

    /// `Y ≤ X`, decided by the instance's own membership rule.
    fn is_reduct_of(&self, y: &Reduct, x: &Reduct) -> bool;

    /// `[s,X]_{|s|+1}`; callers guarantee `s ∈ AX`.
    fn one_step_extensions(&self, s: &Approximation, x: &Reduct) -> Vec<Approximation>;

    /// Selector space instantiating the strengthened pigeonhole axiom.
    fn inner_family(&self) -> Vec<Selector>;

    /// Whether the inner family is a documented restriction of the true
    /// canonical forms.
    fn limited_family(&self) -> bool {
        false
    }

    fn restrict(&self, x: &Reduct, n: usize) -> Result<Approximation> {
        restrict(x, n)
    }
}

/// `r_n(X)`.
pub fn restrict(x: &Reduct, n: usize) -> Result<Approximation> {
    if n > x.len() {
        return Err(Error::Range {
            requested: n,
            length: x.len(),
        });
    }
    Ok(x.prefix(n))
}

pub fn leq_fin(model: &dyn SpaceModel, s: &Approximation, t: &Approximation) -> Result<bool> {
    if !model.is_approximation(s) {
        return Err(Error::mismatch(s));
    }
    if !model.is_approximation(t) {
        return Err(Error::mismatch(t));
    }
    Ok(model.leq_fin_core(s, t))
}

/// Least `k` with `s ≤_fin r_k(X)`.
pub fn depth(model: &dyn SpaceModel, x: &Reduct, s: &Approximation) -> DepthValue {
    (0..=x.len())
        .find(|&k| model.leq_fin_core(s, &x.prefix(k)))
        .map_or(DepthValue::Infinite, DepthValue::Finite)
}

/// `X` is compatible with `s`: some reduct of `X` starts with `s`.
pub fn compat(model: &dyn SpaceModel, x: &Reduct, s: &Approximation) -> bool {
    s.is_empty() || (model.is_approximation(s) && model.leq_fin_core(s, x))
}

/// One-step extensions of `s` inside `X`; empty when `X` is not compatible.
pub fn extensions(model: &dyn SpaceModel, s: &Approximation, x: &Reduct) -> Vec<Approximation> {
    if !compat(model, x, s) {
        return Vec::new();
    }
    let mut out = model.one_step_extensions(s, x);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: Atom) -> Block {
        Block::new(vec![a], LevelInterval::new(a as usize + 1, a as usize + 2))
    }

    fn set(atoms: &[Atom]) -> Approximation {
        Approximation::from_blocks(atoms.iter().map(|&a| single(a)).collect())
    }

    #[test]
    fn restrict_takes_prefixes() {
        let x = set(&[2, 5, 7, 11]);
        assert_eq!(restrict(&x, 2).unwrap(), set(&[2, 5]));
        assert_eq!(restrict(&x, 0).unwrap(), Approximation::empty());
        assert!(matches!(
            restrict(&x, 5),
            Err(Error::Range {
                requested: 5,
                length: 4
            })
        ));
    }

    #[test]
    fn prefix_relation() {
        let x = set(&[1, 2, 3]);
        assert!(set(&[1, 2]).is_prefix_of(&x));
        assert!(Approximation::empty().is_prefix_of(&x));
        assert!(!set(&[2]).is_prefix_of(&x));
    }

    #[test]
    fn ground_rejects_overlap() {
        assert!(GroundSpace::new(InstanceKind::Fin, vec![vec![0, 1], vec![1]]).is_err());
        assert!(GroundSpace::new(InstanceKind::Fin, vec![]).is_err());
        let g = GroundSpace::new(InstanceKind::Fin, vec![vec![0, 1], vec![3]]).unwrap();
        assert_eq!(g.level_of(3), Some(2));
        assert_eq!(g.slice(1, 3), vec![0, 1, 3]);
    }

    #[test]
    fn selectors() {
        let b = Block::new(vec![4, 2, 9], LevelInterval::new(1, 4));
        assert_eq!(Selector::Drop.apply(&b), Vec::<Atom>::new());
        assert_eq!(Selector::Min.apply(&b), vec![2]);
        assert_eq!(Selector::Max.apply(&b), vec![9]);
        assert_eq!(Selector::MinMax.apply(&b), vec![2, 9]);
        assert_eq!(Selector::Identity.apply(&b), vec![2, 4, 9]);
        assert_eq!(Selector::parse("minmax"), Some(Selector::MinMax));
    }
}

//! Built-in coloring generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronts::{Coloring, Front};
use crate::model::{Approximation, Atom};

pub const DEFAULT_RANDOM_COLORS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "generator")]
pub enum ColoringSpec {
    Constant,
    /// Every member its own class.
    Injective,
    /// Least atom used.
    Min,
    /// Greatest atom used.
    Max,
    /// Least and greatest atoms.
    MinMax,
    /// Set of all atoms used.
    Union,
    /// Number of atoms used, mod 2.
    Parity,
    Random {
        seed: u64,
        colors: u32,
    },
}

impl ColoringSpec {
    pub const NAMED: [ColoringSpec; 7] = [
        ColoringSpec::Constant,
        ColoringSpec::Injective,
        ColoringSpec::Min,
        ColoringSpec::Max,
        ColoringSpec::MinMax,
        ColoringSpec::Union,
        ColoringSpec::Parity,
    ];

    pub fn random(seed: u64) -> Self {
        ColoringSpec::Random {
            seed,
            colors: DEFAULT_RANDOM_COLORS,
        }
    }

    /// Color key of one member; random specs are handled by [`generate`].
    fn key(&self, s: &Approximation) -> Vec<Atom> {
        let atoms = s.atoms();
        match self {
            ColoringSpec::Constant | ColoringSpec::Random { .. } => Vec::new(),
            ColoringSpec::Injective => s
                .blocks()
                .iter()
                .flat_map(|b| b.atoms().iter().copied().chain([Atom::MAX]))
                .collect(),
            ColoringSpec::Min => atoms.first().copied().into_iter().collect(),
            ColoringSpec::Max => atoms.last().copied().into_iter().collect(),
            ColoringSpec::MinMax => match (atoms.first(), atoms.last()) {
                (Some(&a), Some(&b)) => vec![a, b],
                _ => Vec::new(),
            },
            ColoringSpec::Union => atoms,
            ColoringSpec::Parity => vec![(atoms.len() % 2) as Atom],
        }
    }
}

impl fmt::Display for ColoringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringSpec::Constant => f.write_str("constant"),
            ColoringSpec::Injective => f.write_str("injective"),
            ColoringSpec::Min => f.write_str("min"),
            ColoringSpec::Max => f.write_str("max"),
            ColoringSpec::MinMax => f.write_str("minmax"),
            ColoringSpec::Union => f.write_str("union"),
            ColoringSpec::Parity => f.write_str("parity"),
            ColoringSpec::Random { seed, colors } => write!(f, "random:{seed}:{colors}"),
        }
    }
}

impl FromStr for ColoringSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let spec = match text {
            "constant" => ColoringSpec::Constant,
            "injective" | "identity" => ColoringSpec::Injective,
            "min" => ColoringSpec::Min,
            "max" => ColoringSpec::Max,
            "minmax" => ColoringSpec::MinMax,
            "union" => ColoringSpec::Union,
            "parity" => ColoringSpec::Parity,
            other => {
                let mut parts = other.split(':');
                if parts.next() != Some("random") {
                    return Err(Error::Input(format!("unknown coloring generator '{other}'")));
                }
                let num = |p: Option<&str>, what: &str| -> Result<Option<u64>> {
                    p.map(|v| v.parse::<u64>().map_err(|_| Error::Input(format!("bad {what} '{v}'"))))
                        .transpose()
                };
                let seed = num(parts.next(), "seed")?.unwrap_or(0);
                let colors = num(parts.next(), "color count")?.unwrap_or(DEFAULT_RANDOM_COLORS as u64);
                if colors == 0 || colors > u32::MAX as u64 || parts.next().is_some() {
                    return Err(Error::Input(format!("bad random coloring '{other}'")));
                }
                ColoringSpec::Random {
                    seed,
                    colors: colors as u32,
                }
            }
        };
        Ok(spec)
    }
}

/// Applies a generator to the members of `front` in their stored order.
pub fn generate(front: &Front, spec: &ColoringSpec) -> Coloring {
    match spec {
        ColoringSpec::Random { seed, colors } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Coloring::from_labels(front.members().iter().map(|_| rng.gen_range(0..*colors)))
        }
        _ => Coloring::from_labels(front.members().iter().map(|s| spec.key(s))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fronts::uniform_front;
    use crate::spaces::{build_ellentuck, EllentuckParams};

    #[test]
    fn parse_round_trip() {
        for spec in ColoringSpec::NAMED {
            assert_eq!(spec.to_string().parse::<ColoringSpec>().unwrap(), spec);
        }
        assert_eq!("random:7".parse::<ColoringSpec>().unwrap(), ColoringSpec::random(7));
        assert_eq!(
            "random:7:2".parse::<ColoringSpec>().unwrap(),
            ColoringSpec::Random { seed: 7, colors: 2 }
        );
        assert!("random:x".parse::<ColoringSpec>().is_err());
        assert!("blue".parse::<ColoringSpec>().is_err());
    }

    #[test]
    fn class_counts() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let au2 = uniform_front(&e, 2).unwrap();
        assert_eq!(generate(&au2, &ColoringSpec::Constant).classes(), 1);
        assert_eq!(generate(&au2, &ColoringSpec::Injective).classes(), 10);
        assert_eq!(generate(&au2, &ColoringSpec::Min).classes(), 4);
        assert_eq!(generate(&au2, &ColoringSpec::Max).classes(), 4);
        assert_eq!(generate(&au2, &ColoringSpec::Parity).classes(), 1);
        let r = generate(&au2, &ColoringSpec::random(3));
        assert_eq!(r, generate(&au2, &ColoringSpec::random(3)));
        assert!(r.classes() <= 3);
    }
}

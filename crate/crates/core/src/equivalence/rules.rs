//! Local derivation rules between point and tile structures.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::spatial::GridIndex;
use crate::substitution::tiling::{pos, Tile, TileFamily, TilingConfig};

use crate::pattern::Pattern;

/// Input or output of a derivation rule.
#[derive(Clone, Debug)]
pub enum Structure {
    Points(Pattern),
    Tiling(TilingConfig),
}

/// A registered local rule. Each rule sees only the tiles within
/// [`DerivationRule::radius`] of the location it is applied at.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DerivationRule {
    Identity,
    /// Each rhomb splits into its two decorated halves.
    PenroseToRobinson,
    /// Each triangle joins its mirror partner across the base.
    RobinsonToPenrose,
}

impl DerivationRule {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(DerivationRule::Identity),
            "penrose-to-robinson" => Ok(DerivationRule::PenroseToRobinson),
            "robinson-to-penrose" => Ok(DerivationRule::RobinsonToPenrose),
            _ => Err(Error::invalid(format!("unknown derivation rule {name:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DerivationRule::Identity => "identity",
            DerivationRule::PenroseToRobinson => "penrose-to-robinson",
            DerivationRule::RobinsonToPenrose => "robinson-to-penrose",
        }
    }

    /// Rule radius in edge lengths.
    pub fn radius(self) -> f64 {
        match self {
            DerivationRule::Identity => 0.0,
            DerivationRule::PenroseToRobinson => 0.0,
            DerivationRule::RobinsonToPenrose => 2.0,
        }
    }

    pub fn inverse(self) -> Option<DerivationRule> {
        match self {
            DerivationRule::Identity => Some(DerivationRule::Identity),
            DerivationRule::PenroseToRobinson => Some(DerivationRule::RobinsonToPenrose),
            DerivationRule::RobinsonToPenrose => Some(DerivationRule::PenroseToRobinson),
        }
    }
}

/// Collects per-location outputs, rejecting disagreeing overlaps: two
/// outputs on the same vertex set must be the same tile.
struct Assembler {
    tiles: BTreeMap<Vec<[i64; 4]>, Tile>,
    family: TileFamily,
}

impl Assembler {
    fn add(&mut self, t: Tile) -> Result<()> {
        let mut key: Vec<[i64; 4]> = t.polygon(self.family).iter().map(|v| v.c).collect();
        key.sort_unstable();
        match self.tiles.get(&key) {
            Some(old) if *old != t => Err(Error::RuleInconsistency(format!(
                "rule outputs disagree on the tile at ({:.3}, {:.3})",
                pos(t.a)[0],
                pos(t.a)[1]
            ))),
            _ => {
                self.tiles.insert(key, t);
                Ok(())
            }
        }
    }

    fn finish(self, outline: Option<Vec<crate::algebra::Cyclo>>) -> TilingConfig {
        let mut tiles: Vec<Tile> = self.tiles.into_values().collect();
        tiles.sort_unstable();
        TilingConfig { family: self.family, tiles, outline }
    }
}

pub fn derive(rule: DerivationRule, input: &Structure) -> Result<Structure> {
    match (rule, input) {
        (DerivationRule::Identity, s) => Ok(s.clone()),
        (DerivationRule::PenroseToRobinson, Structure::Tiling(cfg)) if cfg.family == TileFamily::Rhomb => {
            let mut out = Assembler { tiles: BTreeMap::new(), family: TileFamily::Robinson };
            for t in &cfg.tiles {
                out.add(Tile::triangle(t.kind, t.a, t.b, t.c))?;
                out.add(Tile::triangle(t.kind, t.far_apex(), t.b, t.c))?;
            }
            Ok(Structure::Tiling(out.finish(cfg.outline.clone())))
        }
        (DerivationRule::RobinsonToPenrose, Structure::Tiling(cfg)) if cfg.family == TileFamily::Robinson => {
            let anchors: Vec<[f64; 2]> = cfg.tiles.iter().map(|t| pos(t.a)).collect();
            let r = rule.radius();
            let index = GridIndex::new(&anchors, r);
            let mut out = Assembler { tiles: BTreeMap::new(), family: TileFamily::Rhomb };
            for (i, t) in cfg.tiles.iter().enumerate() {
                // Only the tiles within the rule radius are consulted.
                let mut partner = None;
                for j in index.within(anchors[i], r) {
                    let s = &cfg.tiles[j];
                    if j != i && s.b == t.b && s.c == t.c {
                        if s.kind != t.kind || s.a != t.far_apex() || partner.is_some() {
                            return Err(Error::RuleInconsistency(format!(
                                "triangle base at ({:.3}, {:.3}) has an incompatible neighbour",
                                anchors[i][0], anchors[i][1]
                            )));
                        }
                        partner = Some(j);
                    }
                }
                if partner.is_some() {
                    out.add(Tile::rhomb(t.kind, t.a, t.b, t.c))?;
                }
            }
            Ok(Structure::Tiling(out.finish(cfg.outline.clone())))
        }
        _ => Err(Error::invalid(format!("rule {} does not apply to this input", rule.name()))),
    }
}

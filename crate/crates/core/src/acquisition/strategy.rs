use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which task is the source and which is the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransferDirection {
    /// Dimensional estimation is the source; classification is learned actively.
    #[serde(rename = "DEEtoCEC")]
    DeeToCec,
    /// Classification is the source; dimensional estimation is learned actively.
    #[serde(rename = "CECtoDEE")]
    CecToDee,
}

impl fmt::Display for TransferDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransferDirection::DeeToCec => "DEEtoCEC",
            TransferDirection::CecToDee => "CECtoDEE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategyKind {
    Rand,
    Ent,
    LC,
    SourceMTiGS,
    CTIAL,
    EntCTIAL,
    LCCTIAL,
    MTiGS,
    SourceLC,
    CTiGS,
    MTiGSCTIAL,
    /// Lexicon mapping of the source classifier's output; predicts, never selects.
    NRCMapping,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 12] = [
        StrategyKind::Rand,
        StrategyKind::Ent,
        StrategyKind::LC,
        StrategyKind::SourceMTiGS,
        StrategyKind::CTIAL,
        StrategyKind::EntCTIAL,
        StrategyKind::LCCTIAL,
        StrategyKind::MTiGS,
        StrategyKind::SourceLC,
        StrategyKind::CTiGS,
        StrategyKind::MTiGSCTIAL,
        StrategyKind::NRCMapping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Rand => "Rand",
            StrategyKind::Ent => "Ent",
            StrategyKind::LC => "LC",
            StrategyKind::SourceMTiGS => "SourceMTiGS",
            StrategyKind::CTIAL => "CTIAL",
            StrategyKind::EntCTIAL => "EntCTIAL",
            StrategyKind::LCCTIAL => "LCCTIAL",
            StrategyKind::MTiGS => "MTiGS",
            StrategyKind::SourceLC => "SourceLC",
            StrategyKind::CTiGS => "CTiGS",
            StrategyKind::MTiGSCTIAL => "MTiGSCTIAL",
            StrategyKind::NRCMapping => "NRCMapping",
        }
    }

    pub fn is_selector(self) -> bool {
        self != StrategyKind::NRCMapping
    }

    pub fn valid_for(self, direction: TransferDirection) -> bool {
        use StrategyKind::*;
        match direction {
            TransferDirection::DeeToCec => matches!(self, Rand | Ent | LC | SourceMTiGS | CTIAL | EntCTIAL | LCCTIAL),
            TransferDirection::CecToDee => {
                matches!(self, NRCMapping | Rand | MTiGS | SourceLC | CTiGS | CTIAL | MTiGSCTIAL)
            }
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

/// Accepts the canonical names and spelled-out variants such as `LC-CTIAL`
/// or `Source MTiGS`.
impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize(s);
        let key = if key == "random" { "rand".to_string() } else { key };
        StrategyKind::ALL
            .into_iter()
            .find(|k| normalize(k.name()) == key)
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`")))
    }
}

impl TryFrom<String> for StrategyKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StrategyKind> for String {
    fn from(k: StrategyKind) -> String {
        k.name().to_string()
    }
}

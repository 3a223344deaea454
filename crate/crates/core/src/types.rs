//! Detector settings, flash colors and the per-run record.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid setting {0:?}, expected 1, 2 or 3")]
    Setting(String),
    #[error("invalid color {0:?}, expected R or G")]
    Color(String),
    #[error("invalid wing {0:?}, expected A or B")]
    Wing(String),
}

/// One of the three positions of a detector switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Setting {
    One,
    Two,
    Three,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::One, Setting::Two, Setting::Three];

    /// Zero-based position, 0 for setting 1.
    pub fn index(self) -> usize {
        match self {
            Setting::One => 0,
            Setting::Two => 1,
            Setting::Three => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Setting> {
        Setting::ALL.get(i).copied()
    }

    /// The label printed on the switch (1, 2 or 3).
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Setting {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" => Ok(Setting::One),
            "2" => Ok(Setting::Two),
            "3" => Ok(Setting::Three),
            other => Err(ParseError::Setting(other.to_string())),
        }
    }
}

impl Serialize for Setting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Red, Color::Green];

    pub fn opposite(self) -> Color {
        match self {
            Color::Red => Color::Green,
            Color::Green => Color::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'R' => Some(Color::Red),
            'G' => Some(Color::Green),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Color {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Color::from_letter), chars.next()) {
            (Some(c), None) => Ok(c),
            _ => Err(ParseError::Color(s.to_string())),
        }
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two far-apart detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wing {
    A,
    B,
}

impl Wing {
    pub const BOTH: [Wing; 2] = [Wing::A, Wing::B];

    pub fn index(self) -> usize {
        match self {
            Wing::A => 0,
            Wing::B => 1,
        }
    }

    pub fn other(self) -> Wing {
        match self {
            Wing::A => Wing::B,
            Wing::B => Wing::A,
        }
    }
}

impl fmt::Display for Wing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wing::A => "A",
            Wing::B => "B",
        })
    }
}

impl FromStr for Wing {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(Wing::A),
            "B" => Ok(Wing::B),
            other => Err(ParseError::Wing(other.to_string())),
        }
    }
}

impl Serialize for Wing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Settings chosen at wing A and wing B in one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SettingPair {
    pub a: Setting,
    pub b: Setting,
}

impl SettingPair {
    pub fn new(a: Setting, b: Setting) -> Self {
        SettingPair { a, b }
    }

    /// All nine pairs, row-major in wing A's setting.
    pub fn all() -> impl Iterator<Item = SettingPair> {
        Setting::ALL
            .into_iter()
            .flat_map(|a| Setting::ALL.into_iter().map(move |b| SettingPair { a, b }))
    }

    pub fn is_same(self) -> bool {
        self.a == self.b
    }

    pub fn index(self) -> usize {
        self.a.index() * 3 + self.b.index()
    }

    pub fn from_index(i: usize) -> Option<SettingPair> {
        if i >= 9 {
            return None;
        }
        Some(SettingPair {
            a: Setting::ALL[i / 3],
            b: Setting::ALL[i % 3],
        })
    }

    pub fn setting(self, wing: Wing) -> Setting {
        match wing {
            Wing::A => self.a,
            Wing::B => self.b,
        }
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

/// Colors flashed at wing A and wing B in one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OutcomePair {
    pub ca: Color,
    pub cb: Color,
}

impl OutcomePair {
    /// Canonical order RR, RG, GR, GG.
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair {
            ca: Color::Red,
            cb: Color::Red,
        },
        OutcomePair {
            ca: Color::Red,
            cb: Color::Green,
        },
        OutcomePair {
            ca: Color::Green,
            cb: Color::Red,
        },
        OutcomePair {
            ca: Color::Green,
            cb: Color::Green,
        },
    ];

    pub fn new(ca: Color, cb: Color) -> Self {
        OutcomePair { ca, cb }
    }

    pub fn is_same(self) -> bool {
        self.ca == self.cb
    }

    pub fn index(self) -> usize {
        let bit = |c: Color| (c == Color::Green) as usize;
        bit(self.ca) * 2 + bit(self.cb)
    }

    pub fn color(self, wing: Wing) -> Color {
        match wing {
            Wing::A => self.ca,
            Wing::B => self.cb,
        }
    }
}

impl fmt::Display for OutcomePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ca, self.cb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunRecord {
    pub trial: u64,
    pub pair: SettingPair,
    pub outcome: OutcomePair,
}

impl RunRecord {
    /// One line of the records file: `trial,a,b,ca,cb`.
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.trial, self.pair.a, self.pair.b, self.outcome.ca, self.outcome.cb
        )
    }
}

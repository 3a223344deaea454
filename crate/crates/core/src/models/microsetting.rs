//! Instruction sets extended over microsettings.
//!
//! Each macroscopic setting of a detector is realized by one of several
//! microsettings. Which one is active in a run is fixed by the ambient
//! condition shared by both detectors, and the extended instruction set
//! (a color per microsetting) decides what each detector flashes.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::{AmbientDistribution, InstructionSet, LocalModel, ModelError, Tau};
use crate::rational::{self, Ratio};
use crate::rng::Substream;
use crate::types::{Color, Setting, Wing};

/// Index of a microsetting in its wing's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MicroId(pub usize);

/// Coexistence class of a microsetting relative to its setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum MicroType {
    I,
    II,
}

impl fmt::Display for MicroType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MicroType::I => "I",
            MicroType::II => "II",
        })
    }
}

/// Name-based description of one wing, as read from a model document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WingSpec {
    /// Microsettings available under settings 1, 2, 3.
    pub micro_sets: [Vec<String>; 3],
    /// Per setting, the selected microsetting for each ambient condition
    /// (keyed by the condition's label).
    pub select: [BTreeMap<String, String>; 3],
    pub color_map: BTreeMap<String, Color>,
}

#[derive(Debug, Clone, PartialEq)]
struct WingTable {
    labels: Vec<String>,
    setting_of: Vec<Setting>,
    colors: Vec<Color>,
    micro_sets: [Vec<MicroId>; 3],
    /// `select[s][tau]`
    select: [Vec<MicroId>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicrosettingModel {
    wings: [WingTable; 2],
    ambient: AmbientDistribution,
    stationary: bool,
}

impl MicrosettingModel {
    pub fn new(
        ambient: AmbientDistribution,
        wings: [WingSpec; 2],
        stationary: bool,
    ) -> Result<Self, ModelError> {
        let [a, b] = wings;
        let wings = [
            WingTable::build(Wing::A, a, &ambient)?,
            WingTable::build(Wing::B, b, &ambient)?,
        ];
        let model = MicrosettingModel {
            wings,
            ambient,
            stationary,
        };
        if stationary {
            model.check_stationary()?;
        }
        Ok(model)
    }

    fn check_stationary(&self) -> Result<(), ModelError> {
        for wing in Wing::BOTH {
            for setting in Setting::ALL {
                let mut colors = self
                    .ambient
                    .support()
                    .map(|tau| self.respond_at(wing, setting, tau));
                if let Some(first) = colors.next() {
                    if colors.any(|c| c != first) {
                        return Err(ModelError::NotStationary { wing, setting });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &AmbientDistribution {
        &self.ambient
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn micro_set(&self, wing: Wing, setting: Setting) -> &[MicroId] {
        &self.wings[wing.index()].micro_sets[setting.index()]
    }

    pub fn select(&self, wing: Wing, setting: Setting, tau: Tau) -> MicroId {
        self.wings[wing.index()].select[setting.index()][tau.0]
    }

    pub fn color(&self, wing: Wing, micro: MicroId) -> Color {
        self.wings[wing.index()].colors[micro.0]
    }

    pub fn micro_label(&self, wing: Wing, micro: MicroId) -> &str {
        &self.wings[wing.index()].labels[micro.0]
    }

    pub fn micro_count(&self, wing: Wing) -> usize {
        self.wings[wing.index()].labels.len()
    }

    /// The color flashed at `wing` under `setting` when the ambient
    /// condition is `tau`.
    pub fn respond_at(&self, wing: Wing, setting: Setting, tau: Tau) -> Color {
        self.color(wing, self.select(wing, setting, tau))
    }

    /// Back to the name-based form.
    pub fn wing_spec(&self, wing: Wing) -> WingSpec {
        let t = &self.wings[wing.index()];
        let name = |m: &MicroId| t.labels[m.0].clone();
        WingSpec {
            micro_sets: std::array::from_fn(|s| t.micro_sets[s].iter().map(name).collect()),
            select: std::array::from_fn(|s| {
                self.ambient
                    .all()
                    .map(|tau| {
                        (
                            self.ambient.label(tau).to_string(),
                            name(&t.select[s][tau.0]),
                        )
                    })
                    .collect()
            }),
            color_map: t
                .labels
                .iter()
                .cloned()
                .zip(t.colors.iter().copied())
                .collect(),
        }
    }
}

impl WingTable {
    fn build(
        wing: Wing,
        spec: WingSpec,
        ambient: &AmbientDistribution,
    ) -> Result<Self, ModelError> {
        let mut labels = Vec::new();
        let mut setting_of = Vec::new();
        let mut index = BTreeMap::new();
        let mut micro_sets: [Vec<MicroId>; 3] = Default::default();
        for setting in Setting::ALL {
            let names = &spec.micro_sets[setting.index()];
            if names.is_empty() {
                return Err(ModelError::EmptyMicroSet { wing, setting });
            }
            for name in names {
                if index.contains_key(name) {
                    return Err(ModelError::DuplicateMicro {
                        wing,
                        micro: name.clone(),
                    });
                }
                let id = MicroId(labels.len());
                index.insert(name.clone(), id);
                labels.push(name.clone());
                setting_of.push(setting);
                micro_sets[setting.index()].push(id);
            }
        }

        if let Some(extra) = spec.color_map.keys().find(|k| !index.contains_key(*k)) {
            return Err(ModelError::UnknownMicro {
                wing,
                micro: extra.clone(),
            });
        }
        let colors = labels
            .iter()
            .map(|l| {
                spec.color_map
                    .get(l)
                    .copied()
                    .ok_or_else(|| ModelError::MissingColor {
                        wing,
                        micro: l.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut select: [Vec<MicroId>; 3] = Default::default();
        for setting in Setting::ALL {
            let table = &spec.select[setting.index()];
            if let Some(extra) = table.keys().find(|k| ambient.find(k).is_none()) {
                return Err(ModelError::MissingSelect {
                    wing,
                    setting,
                    tau: format!("{extra} (not an ambient condition)"),
                });
            }
            for tau in ambient.all() {
                let label = ambient.label(tau);
                let micro = table.get(label).ok_or_else(|| ModelError::MissingSelect {
                    wing,
                    setting,
                    tau: label.to_string(),
                })?;
                let outside = || ModelError::SelectOutsideMicroSet {
                    wing,
                    setting,
                    tau: label.to_string(),
                    micro: micro.clone(),
                };
                let id = *index.get(micro).ok_or_else(outside)?;
                if setting_of[id.0] != setting {
                    return Err(outside());
                }
                select[setting.index()].push(id);
            }
        }

        Ok(WingTable {
            labels,
            setting_of,
            colors,
            micro_sets,
            select,
        })
    }
}

impl LocalModel for MicrosettingModel {
    type Hidden = ();

    fn ambient(&self) -> Option<&AmbientDistribution> {
        Some(&self.ambient)
    }

    fn prepare(&self, _: Option<Tau>, _: &mut Substream) {}

    fn respond(&self, wing: Wing, setting: Setting, _: &(), tau: Tau, _: &mut Substream) -> Color {
        self.respond_at(wing, setting, tau)
    }
}

pub fn microsetting_respond(
    m: &MicrosettingModel,
    wing: Wing,
    setting: Setting,
    tau: Tau,
) -> Color {
    m.respond_at(wing, setting, tau)
}

/// Two microsettings per (wing, setting), one of each type. Type-I
/// microsettings flash the color `base` gives their setting and type-II
/// flash the opposite. Each ambient condition picks a type per setting,
/// shared by both wings.
pub fn two_type_model(
    base: InstructionSet,
    conditions: &[(&str, [MicroType; 3], Ratio)],
) -> Result<MicrosettingModel, ModelError> {
    let ambient = AmbientDistribution::new(
        conditions
            .iter()
            .map(|(l, _, w)| (l.to_string(), w.clone()))
            .collect(),
    )?;
    let wing_spec = |wing: Wing| {
        let name = |s: Setting, t: MicroType| format!("{wing}{s}.{t}");
        let mut spec = WingSpec::default();
        for s in Setting::ALL {
            for t in [MicroType::I, MicroType::II] {
                spec.micro_sets[s.index()].push(name(s, t));
                let c = base.color(s);
                let c = if t == MicroType::I { c } else { c.opposite() };
                spec.color_map.insert(name(s, t), c);
            }
            for (label, types, _) in conditions {
                spec.select[s.index()].insert(label.to_string(), name(s, types[s.index()]));
            }
        }
        spec
    };
    MicrosettingModel::new(ambient, [wing_spec(Wing::A), wing_spec(Wing::B)], false)
}

/// Base set GGR with two equally likely conditions: `all-I`, and `II-I-II`
/// where settings 1 and 3 are realized by type-II microsettings and
/// setting 2 by type I. Under `II-I-II` the model behaves as RGG.
pub fn worked_example() -> MicrosettingModel {
    use MicroType::{I, II};
    two_type_model(
        "GGR".parse().expect("valid set"),
        &[
            ("all-I", [I, I, I], rational::ratio(1, 2)),
            ("II-I-II", [II, I, II], rational::ratio(1, 2)),
        ],
    )
    .expect("worked example is well formed")
}

/// Size parameters for [`generate_compliant_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    /// Microsettings per setting at wing A and wing B.
    pub micro_per_setting: [usize; 2],
    pub ambient_size: usize,
    /// Every microsetting's color is the same for all ambient conditions.
    pub stationary: bool,
    /// Every same-setting pair of microsettings co-occurs under some
    /// condition. Raises `ambient_size` to at least the product of the
    /// per-wing counts.
    pub full_support: bool,
}

impl GeneratorParams {
    pub fn new(micro_a: usize, micro_b: usize, ambient_size: usize) -> Self {
        GeneratorParams {
            micro_per_setting: [micro_a, micro_b],
            ambient_size,
            stationary: false,
            full_support: false,
        }
    }
}

fn random_color<R: Rng + ?Sized>(rng: &mut R) -> Color {
    if rng.random::<bool>() {
        Color::Green
    } else {
        Color::Red
    }
}

/// Builds a random microsetting model in which both wings always flash
/// the same color when their settings agree.
pub fn generate_compliant_model<R: Rng + ?Sized>(
    params: GeneratorParams,
    rng: &mut R,
) -> MicrosettingModel {
    let [na, nb] = params.micro_per_setting.map(|n| n.max(1));
    let mut n_tau = params.ambient_size.max(1);
    if params.full_support {
        n_tau = n_tau.max(na * nb);
    }

    let raw: Vec<u64> = (0..n_tau).map(|_| rng.random_range(1..=20)).collect();
    let total: u64 = raw.iter().sum();
    let ambient = AmbientDistribution::new(
        raw.iter()
            .enumerate()
            .map(|(i, w)| (format!("t{i}"), rational::from_count(*w, total)))
            .collect(),
    )
    .expect("normalized by construction");

    let mut specs = [WingSpec::default(), WingSpec::default()];
    let name = |wing: Wing, s: Setting, i: usize| format!("{wing}{s}.{i}");

    for s in Setting::ALL {
        // colors[w][i]: color of microsetting i of setting s at wing w
        let mut colors: [Vec<Color>; 2] = [
            (0..na).map(|_| random_color(rng)).collect(),
            (0..nb).map(|_| random_color(rng)).collect(),
        ];
        let fixed = random_color(rng);
        if params.full_support {
            colors = [vec![fixed; na], vec![fixed; nb]];
        } else if !colors[1].contains(&colors[0][0]) {
            colors[1][0] = colors[0][0];
        }

        let shared: Vec<Color> = Color::ALL
            .into_iter()
            .filter(|c| colors[0].contains(c) && colors[1].contains(c))
            .collect();
        let stationary_color = *shared.choose(rng).expect("at least one shared color");
        let offset = rng.random_range(0..na * nb);

        for tau in 0..n_tau {
            let (ia, ib) = if params.full_support && tau < na * nb {
                let k = (tau + offset) % (na * nb);
                (k / nb, k % nb)
            } else {
                let c = if params.stationary {
                    stationary_color
                } else {
                    *shared.choose(rng).expect("nonempty")
                };
                let pick = |cs: &[Color], rng: &mut R| {
                    let mut idx: Vec<usize> = (0..cs.len()).filter(|i| cs[*i] == c).collect();
                    idx.shuffle(rng);
                    idx[0]
                };
                (pick(&colors[0], rng), pick(&colors[1], rng))
            };
            let label = format!("t{tau}");
            specs[0].select[s.index()].insert(label.clone(), name(Wing::A, s, ia));
            specs[1].select[s.index()].insert(label, name(Wing::B, s, ib));
        }

        for wing in Wing::BOTH {
            let cs = &colors[wing.index()];
            for (i, c) in cs.iter().enumerate() {
                let spec = &mut specs[wing.index()];
                spec.micro_sets[s.index()].push(name(wing, s, i));
                spec.color_map.insert(name(wing, s, i), *c);
            }
        }
    }

    // A full-support model is stationary automatically: each setting has
    // a single color.
    let stationary = params.stationary || params.full_support;
    MicrosettingModel::new(ambient, specs, stationary).expect("compliant by construction")
}

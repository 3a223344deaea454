//! Coexistence graphs of microsettings.
//!
//! For a fixed setting, a wing-A microsetting and a wing-B microsetting
//! coexist when some ambient condition of positive weight selects both.
//! Equal-setting agreement forces every edge to join equal colors, so each
//! connected component carries a single color. Components whose color
//! matches the component holding the lexicographically smallest wing-A
//! microsetting are type I; the rest are type II.

use std::fmt;

use crate::models::{InstructionSet, MicroId, MicroType, MicrosettingModel, Tau};
use crate::rational::Ratio;
use crate::types::{Color, Setting, Wing};

/// A run condition under which equal settings flash different colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub setting: Setting,
    pub tau: Tau,
    pub tau_label: String,
    pub micro_a: String,
    pub micro_b: String,
    pub color_a: Color,
    pub color_b: Color,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "setting {} under ambient condition {:?}: wing A {} flashes {}, wing B {} flashes {}",
            self.setting, self.tau_label, self.micro_a, self.color_a, self.micro_b, self.color_b
        )
    }
}

fn violation_at(m: &MicrosettingModel, setting: Setting, tau: Tau) -> Option<Violation> {
    let (ma, mb) = (
        m.select(Wing::A, setting, tau),
        m.select(Wing::B, setting, tau),
    );
    let (ca, cb) = (m.color(Wing::A, ma), m.color(Wing::B, mb));
    (ca != cb).then(|| Violation {
        setting,
        tau,
        tau_label: m.ambient().label(tau).to_string(),
        micro_a: m.micro_label(Wing::A, ma).to_string(),
        micro_b: m.micro_label(Wing::B, mb).to_string(),
        color_a: ca,
        color_b: cb,
    })
}

/// `Ok` iff both wings agree for every setting and every ambient condition
/// of positive weight; otherwise the first violation in (setting, τ) order.
pub fn check_feature_i_exact(m: &MicrosettingModel) -> Result<(), Violation> {
    for setting in Setting::ALL {
        for tau in m.ambient().support() {
            if let Some(v) = violation_at(m, setting, tau) {
                return Err(v);
            }
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of a bipartite graph on `n_a + n_b` nodes. Each
/// component is `(left nodes, right nodes)`, both sorted; components are
/// ordered by their smallest node, left side first.
pub fn bipartite_components(
    n_a: usize,
    n_b: usize,
    edges: &[(usize, usize)],
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut uf = UnionFind::new(n_a + n_b);
    for &(a, b) in edges {
        uf.union(a, n_a + b);
    }
    let mut by_root: Vec<Option<usize>> = vec![None; n_a + n_b];
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for node in 0..n_a + n_b {
        let root = uf.find(node);
        let slot = *by_root[root].get_or_insert_with(|| {
            out.push((Vec::new(), Vec::new()));
            out.len() - 1
        });
        if node < n_a {
            out[slot].0.push(node);
        } else {
            out[slot].1.push(node - n_a);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForcedColor {
    Color(Color),
    Conflict(Violation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub micro_a: Vec<String>,
    pub micro_b: Vec<String>,
    pub forced: ForcedColor,
    /// Assigned only when the whole setting is conflict-free.
    pub micro_type: Option<MicroType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingPartition {
    pub setting: Setting,
    pub components: Vec<Component>,
}

/// Per setting, the components of the coexistence graph restricted to
/// microsettings reachable from the ambient support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoexistencePartition {
    pub settings: Vec<SettingPartition>,
}

impl CoexistencePartition {
    pub fn setting(&self, s: Setting) -> &SettingPartition {
        &self.settings[s.index()]
    }
}

fn partition_setting(m: &MicrosettingModel, setting: Setting) -> SettingPartition {
    let ids_a = m.micro_set(Wing::A, setting);
    let ids_b = m.micro_set(Wing::B, setting);
    let local = |ids: &[MicroId], id: MicroId| {
        ids.iter()
            .position(|x| *x == id)
            .expect("select within set")
    };

    let support: Vec<Tau> = m.ambient().support().collect();
    let edges: Vec<(usize, usize)> = support
        .iter()
        .map(|&tau| {
            (
                local(ids_a, m.select(Wing::A, setting, tau)),
                local(ids_b, m.select(Wing::B, setting, tau)),
            )
        })
        .collect();

    let mut components: Vec<Component> = bipartite_components(ids_a.len(), ids_b.len(), &edges)
        .into_iter()
        // isolated nodes are never selected on the support
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .map(|(a, b)| {
            let conflict = support.iter().zip(&edges).find_map(|(&tau, (ea, _))| {
                if a.contains(ea) {
                    violation_at(m, setting, tau)
                } else {
                    None
                }
            });
            let forced = match conflict {
                Some(v) => ForcedColor::Conflict(v),
                None => ForcedColor::Color(m.color(Wing::A, ids_a[a[0]])),
            };
            let mut micro_a: Vec<String> = a
                .iter()
                .map(|i| m.micro_label(Wing::A, ids_a[*i]).to_string())
                .collect();
            let mut micro_b: Vec<String> = b
                .iter()
                .map(|i| m.micro_label(Wing::B, ids_b[*i]).to_string())
                .collect();
            micro_a.sort();
            micro_b.sort();
            Component {
                micro_a,
                micro_b,
                forced,
                micro_type: None,
            }
        })
        .collect();
    components.sort_by(|x, y| x.micro_a[0].cmp(&y.micro_a[0]));

    let type_i_color = match components.first().map(|c| &c.forced) {
        Some(ForcedColor::Color(c)) => Some(*c),
        _ => None,
    };
    let all_forced = components
        .iter()
        .all(|c| matches!(c.forced, ForcedColor::Color(_)));
    if let (Some(ti), true) = (type_i_color, all_forced) {
        for c in &mut components {
            c.micro_type = Some(match c.forced {
                ForcedColor::Color(col) if col == ti => MicroType::I,
                _ => MicroType::II,
            });
        }
    }
    SettingPartition {
        setting,
        components,
    }
}

pub fn coexistence_partition(m: &MicrosettingModel) -> CoexistencePartition {
    CoexistencePartition {
        settings: Setting::ALL
            .iter()
            .map(|s| partition_setting(m, *s))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SettingVerdict {
    /// One coexistence component: every reachable microsetting flashes
    /// `color`.
    FullyCollapsed {
        color: Color,
    },
    /// Several components; type-I components flash `type_i`, type-II
    /// components flash its opposite.
    TwoType {
        type_i: Color,
        components: usize,
        type_ii_present: bool,
    },
    Violation(Violation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    FullyCollapsed,
    TwoType,
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FullyCollapsed => "fully-collapsed",
            Verdict::TwoType => "two-type",
            Verdict::Violation => "violation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseReport {
    pub per_setting: Vec<(Setting, SettingVerdict)>,
    pub verdict: Verdict,
    /// First violation in (setting, τ) order, if any.
    pub witness: Option<Violation>,
    /// Effective instruction set for each ambient condition in the support.
    /// Empty when the model is non-compliant.
    pub effective_by_tau: Vec<(String, InstructionSet)>,
    /// Total weight of each effective set, in canonical set order, zero
    /// weights omitted.
    pub effective_distribution: Vec<(InstructionSet, Ratio)>,
    pub partition: CoexistencePartition,
}

pub fn collapse_analysis(m: &MicrosettingModel) -> CollapseReport {
    let partition = coexistence_partition(m);
    let witness = check_feature_i_exact(m).err();
    let per_setting: Vec<(Setting, SettingVerdict)> = partition
        .settings
        .iter()
        .map(|sp| {
            let conflict = sp.components.iter().find_map(|c| match &c.forced {
                ForcedColor::Conflict(v) => Some(v.clone()),
                ForcedColor::Color(_) => None,
            });
            let verdict = match (conflict, sp.components.as_slice()) {
                (Some(v), _) => SettingVerdict::Violation(v),
                (None, [only]) => match only.forced {
                    ForcedColor::Color(color) => SettingVerdict::FullyCollapsed { color },
                    ForcedColor::Conflict(_) => unreachable!(),
                },
                (None, comps) => {
                    let type_i = match comps[0].forced {
                        ForcedColor::Color(c) => c,
                        ForcedColor::Conflict(_) => unreachable!(),
                    };
                    SettingVerdict::TwoType {
                        type_i,
                        components: comps.len(),
                        type_ii_present: comps.iter().any(|c| c.micro_type == Some(MicroType::II)),
                    }
                }
            };
            (sp.setting, verdict)
        })
        .collect();

    let verdict = per_setting
        .iter()
        .map(|(_, v)| match v {
            SettingVerdict::FullyCollapsed { .. } => Verdict::FullyCollapsed,
            SettingVerdict::TwoType { .. } => Verdict::TwoType,
            SettingVerdict::Violation(_) => Verdict::Violation,
        })
        .max()
        .unwrap_or(Verdict::FullyCollapsed);

    let (effective_by_tau, effective_distribution) = if witness.is_none() {
        let by_tau: Vec<(String, InstructionSet)> = m
            .ambient()
            .support()
            .map(|tau| {
                (
                    m.ambient().label(tau).to_string(),
                    super::effective_set_unchecked(m, tau),
                )
            })
            .collect();
        let mut weights = vec![Ratio::default(); 8];
        for tau in m.ambient().support() {
            weights[super::effective_set_unchecked(m, tau).canonical_index()] +=
                m.ambient().weight(tau);
        }
        let dist = weights
            .into_iter()
            .enumerate()
            .filter(|(_, w)| *w != Ratio::default())
            .map(|(i, w)| (InstructionSet::from_canonical_index(i), w))
            .collect();
        (by_tau, dist)
    } else {
        (Vec::new(), Vec::new())
    };

    CollapseReport {
        per_setting,
        verdict,
        witness,
        effective_by_tau,
        effective_distribution,
        partition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        generate_compliant_model, two_type_model, worked_example, AmbientDistribution,
        GeneratorParams, WingSpec,
    };
    use crate::rational::ratio;
    use crate::rng::{RandomnessStream, Role};
    use proptest::prelude::*;

    fn set(s: &str) -> InstructionSet {
        s.parse().unwrap()
    }

    // Two microsettings per (wing, setting), every one of the four A/B
    // pairs selected by some condition: complete bipartite support.
    fn full_support_model(colors: InstructionSet) -> MicrosettingModel {
        let taus = ["t0", "t1", "t2", "t3"];
        let amb = AmbientDistribution::uniform(4).unwrap();
        let spec = |wing: Wing| {
            let mut w = WingSpec::default();
            for s in Setting::ALL {
                for i in 0..2 {
                    let name = format!("{wing}{s}.{i}");
                    w.micro_sets[s.index()].push(name.clone());
                    w.color_map.insert(name, colors.color(s));
                }
                for (k, t) in taus.iter().enumerate() {
                    let i = if wing == Wing::A { k / 2 } else { k % 2 };
                    w.select[s.index()].insert(t.to_string(), format!("{wing}{s}.{i}"));
                }
            }
            w
        };
        MicrosettingModel::new(amb, [spec(Wing::A), spec(Wing::B)], false).unwrap()
    }

    fn planted_violation() -> MicrosettingModel {
        let m = full_support_model(set("GRG"));
        let mut b = m.wing_spec(Wing::B);
        // wing B, setting 2: microsetting 1 now flashes G while A flashes R
        b.color_map.insert("B2.1".into(), Color::Green);
        MicrosettingModel::new(m.ambient().clone(), [m.wing_spec(Wing::A), b], false).unwrap()
    }

    #[test]
    fn complete_bipartite_is_one_component() {
        let m = full_support_model(set("GRG"));
        let p = coexistence_partition(&m);
        for s in Setting::ALL {
            assert_eq!(p.setting(s).components.len(), 1);
            assert_eq!(p.setting(s).components[0].micro_type, Some(MicroType::I));
        }
        let r = collapse_analysis(&m);
        assert_eq!(r.verdict, Verdict::FullyCollapsed);
        assert_eq!(r.effective_distribution, vec![(set("GRG"), ratio(1, 1))]);
    }

    #[test]
    fn disjoint_blocks_are_types_i_and_ii() {
        let m = worked_example();
        let p = coexistence_partition(&m);
        let s1 = p.setting(Setting::One);
        assert_eq!(s1.components.len(), 2);
        assert_eq!(s1.components[0].micro_a, vec!["A1.I"]);
        assert_eq!(s1.components[0].micro_type, Some(MicroType::I));
        assert_eq!(s1.components[1].micro_a, vec!["A1.II"]);
        assert_eq!(s1.components[1].micro_type, Some(MicroType::II));
        // setting 2 only ever uses type-I microsettings
        assert_eq!(p.setting(Setting::Two).components.len(), 1);

        let r = collapse_analysis(&m);
        assert_eq!(r.verdict, Verdict::TwoType);
        assert!(r.witness.is_none());
        assert!(r
            .effective_by_tau
            .contains(&("II-I-II".to_string(), set("RGG"))));
        assert_eq!(
            r.effective_distribution,
            vec![(set("RGG"), ratio(1, 2)), (set("GGR"), ratio(1, 2))]
        );
    }

    #[test]
    fn single_microsetting_is_type_i() {
        let mut rng = RandomnessStream::new(0).substream(0, Role::Source);
        let m = generate_compliant_model(GeneratorParams::new(1, 1, 1), &mut rng);
        let p = coexistence_partition(&m);
        for s in Setting::ALL {
            let comps = &p.setting(s).components;
            assert_eq!(comps.len(), 1);
            assert_eq!((comps[0].micro_a.len(), comps[0].micro_b.len()), (1, 1));
            assert_eq!(comps[0].micro_type, Some(MicroType::I));
        }
        assert_eq!(collapse_analysis(&m).verdict, Verdict::FullyCollapsed);
    }

    #[test]
    fn planted_defect_is_reported() {
        let m = planted_violation();
        let v = check_feature_i_exact(&m).unwrap_err();
        assert_eq!(v.setting, Setting::Two);
        // t1 is the first condition selecting B2.1
        assert_eq!(v.tau_label, "t1");
        assert_eq!((v.color_a, v.color_b), (Color::Red, Color::Green));
        let r = collapse_analysis(&m);
        assert_eq!(r.verdict, Verdict::Violation);
        assert_eq!(r.witness.as_ref(), Some(&v));
        assert!(r.effective_by_tau.is_empty());
        assert!(matches!(r.per_setting[1].1, SettingVerdict::Violation(ref w) if *w == v));
        assert!(super::super::exact_same_fraction(&m).is_err());
        assert!(super::super::derive_effective_instruction_set(&m, Tau(0)).is_err());
    }

    #[test]
    fn zero_weight_conditions_are_ignored() {
        use MicroType::{I, II};
        let m = two_type_model(
            set("GGR"),
            &[
                ("live", [I, I, I], ratio(1, 1)),
                ("dead", [II, I, I], ratio(0, 1)),
            ],
        )
        .unwrap();
        // make the dead condition incompatible: wing B uses type I at setting 1
        let mut b = m.wing_spec(Wing::B);
        b.select[0].insert("dead".into(), "B1.I".into());
        let m =
            MicrosettingModel::new(m.ambient().clone(), [m.wing_spec(Wing::A), b], false).unwrap();
        assert!(check_feature_i_exact(&m).is_ok());
        assert_eq!(collapse_analysis(&m).verdict, Verdict::FullyCollapsed);
    }

    proptest! {
        #[test]
        fn adding_edges_never_adds_components(
            na in 1usize..6,
            nb in 1usize..6,
            edges in proptest::collection::vec((0usize..6, 0usize..6), 0..20),
            extra in (0usize..6, 0usize..6),
        ) {
            let edges: Vec<_> = edges.into_iter().map(|(a, b)| (a % na, b % nb)).collect();
            let before = bipartite_components(na, nb, &edges).len();
            let mut more = edges.clone();
            more.push((extra.0 % na, extra.1 % nb));
            prop_assert!(bipartite_components(na, nb, &more).len() <= before);
            let covered: usize = bipartite_components(na, nb, &edges).iter().map(|(a, b)| a.len() + b.len()).sum();
            prop_assert_eq!(covered, na + nb);
        }

        #[test]
        fn compliant_components_are_monochrome(seed in any::<u64>(), na in 1usize..5, nb in 1usize..5, nt in 1usize..8) {
            let mut rng = RandomnessStream::new(seed).substream(0, Role::Source);
            let m = generate_compliant_model(GeneratorParams::new(na, nb, nt), &mut rng);
            prop_assert!(check_feature_i_exact(&m).is_ok());
            let p = coexistence_partition(&m);
            for sp in &p.settings {
                for c in &sp.components {
                    let ForcedColor::Color(color) = c.forced else { panic!("conflict in compliant model") };
                    for wing in Wing::BOTH {
                        let names = if wing == Wing::A { &c.micro_a } else { &c.micro_b };
                        for id in m.micro_set(wing, sp.setting) {
                            if names.iter().any(|n| n == m.micro_label(wing, *id)) {
                                prop_assert_eq!(m.color(wing, *id), color);
                            }
                        }
                    }
                }
            }
            prop_assert_ne!(collapse_analysis(&m).verdict, Verdict::Violation);
        }
    }
}

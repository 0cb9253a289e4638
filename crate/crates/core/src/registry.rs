//! Metric identities, kinds, orientations, and ensemble group membership.
//!
//! The tables here are static and immutable. Metric ids are case-sensitive
//! canonical strings; [`canonical_id`] maps a few common spellings onto them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    ReferenceBased,
    Qe,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::ReferenceBased => "reference_based",
            MetricKind::Qe => "qe",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    /// True when `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::HigherBetter => a > b,
            Orientation::LowerBetter => a < b,
        }
    }

    /// Maps a score onto a higher-is-better scale without changing its rank.
    #[inline]
    pub fn normalize(self, value: f64) -> f64 {
        match self {
            Orientation::HigherBetter => value,
            Orientation::LowerBetter => -value,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::HigherBetter => Orientation::LowerBetter,
            Orientation::LowerBetter => Orientation::HigherBetter,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::HigherBetter => "higher_better",
            Orientation::LowerBetter => "lower_better",
        })
    }
}

/// Whether the toolkit can compute the metric itself or must ingest scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Native,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricSpec {
    pub id: &'static str,
    pub kind: MetricKind,
    pub orientation: Orientation,
    pub provenance: Provenance,
}

impl MetricSpec {
    pub fn is_lexical(&self) -> bool {
        self.provenance == Provenance::Native
    }
}

const fn spec(
    id: &'static str,
    kind: MetricKind,
    orientation: Orientation,
    provenance: Provenance,
) -> MetricSpec {
    MetricSpec {
        id,
        kind,
        orientation,
        provenance,
    }
}

use MetricKind::{Qe, ReferenceBased};
use Orientation::{HigherBetter, LowerBetter};
use Provenance::{External, Native};

pub const METRICX: &str = "MetricX";
pub const METRICX_QE: &str = "MetricX-QE";
pub const XCOMET_XXL: &str = "XCOMET-XXL";
pub const XCOMET_XL: &str = "XCOMET-XL";
pub const COMET22: &str = "COMET22";
pub const AFRICOMET: &str = "AfriCOMET";
pub const INDICCOMET: &str = "IndicCOMET";
pub const BLEURT: &str = "BLEURT";
pub const YISI: &str = "YiSi";
pub const SENT_BLEU: &str = "sentBLEU";
pub const CHRF: &str = "chrF";
pub const CHRF_PP: &str = "chrF++";
pub const TER: &str = "TER";
pub const COMETKIWI23_XXL: &str = "CometKiwi23-XXL";
pub const COMETKIWI23_XL: &str = "CometKiwi23-XL";
pub const COMETKIWI22: &str = "CometKiwi22";
pub const AFRICOMET_QE: &str = "AfriCOMET-QE";

/// The twelve reference-based utility metrics followed by the five QE metrics.
pub static METRICS: [MetricSpec; 17] = [
    spec(METRICX, ReferenceBased, LowerBetter, External),
    spec(XCOMET_XXL, ReferenceBased, HigherBetter, External),
    spec(XCOMET_XL, ReferenceBased, HigherBetter, External),
    spec(COMET22, ReferenceBased, HigherBetter, External),
    spec(AFRICOMET, ReferenceBased, HigherBetter, External),
    spec(INDICCOMET, ReferenceBased, HigherBetter, External),
    spec(BLEURT, ReferenceBased, HigherBetter, External),
    spec(YISI, ReferenceBased, HigherBetter, External),
    spec(SENT_BLEU, ReferenceBased, HigherBetter, Native),
    spec(CHRF, ReferenceBased, HigherBetter, Native),
    spec(CHRF_PP, ReferenceBased, HigherBetter, Native),
    spec(TER, ReferenceBased, LowerBetter, Native),
    spec(METRICX_QE, Qe, LowerBetter, External),
    spec(COMETKIWI23_XXL, Qe, HigherBetter, External),
    spec(COMETKIWI23_XL, Qe, HigherBetter, External),
    spec(COMETKIWI22, Qe, HigherBetter, External),
    spec(AFRICOMET_QE, Qe, HigherBetter, External),
];

static ALIASES: &[(&str, &str)] = &[
    ("metricx", METRICX),
    ("metricx-23", METRICX),
    ("MetricX-23", METRICX),
    ("metricx-qe", METRICX_QE),
    ("MetricX-23-QE", METRICX_QE),
    ("xcomet-xxl", XCOMET_XXL),
    ("xcomet-xl", XCOMET_XL),
    ("comet22", COMET22),
    ("africomet", AFRICOMET),
    ("indiccomet", INDICCOMET),
    ("bleurt", BLEURT),
    ("yisi", YISI),
    ("YiSi-1", YISI),
    ("yisi-1", YISI),
    ("sentbleu", SENT_BLEU),
    ("bleu", SENT_BLEU),
    ("BLEU", SENT_BLEU),
    ("chrf", CHRF),
    ("chrf++", CHRF_PP),
    ("ter", TER),
    ("cometkiwi23-xxl", COMETKIWI23_XXL),
    ("cometkiwi23-xl", COMETKIWI23_XL),
    ("cometkiwi22", COMETKIWI22),
    ("africomet-qe", AFRICOMET_QE),
];

/// Resolves an id or alias to its canonical spelling.
pub fn canonical_id(id: &str) -> Result<&'static str> {
    if let Some(spec) = METRICS.iter().find(|s| s.id == id) {
        return Ok(spec.id);
    }
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == id)
        .map(|(_, canonical)| *canonical)
        .ok_or_else(|| Error::UnknownMetric(id.to_string()))
}

pub fn lookup(id: &str) -> Result<&'static MetricSpec> {
    let canonical = canonical_id(id)?;
    Ok(METRICS
        .iter()
        .find(|s| s.id == canonical)
        .expect("canonical ids are registered"))
}

/// Reference-based metrics evaluated against the true reference are stored
/// as QE-shaped vectors under `<metric>@ref`.
pub const AT_REF_SUFFIX: &str = "@ref";

pub fn at_ref_key(metric: &str) -> String {
    format!("{metric}{AT_REF_SUFFIX}")
}

/// Splits `<metric>@ref` into the base metric id.
pub fn strip_at_ref(key: &str) -> Option<&str> {
    key.strip_suffix(AT_REF_SUFFIX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LanguageFamily {
    African,
    Indic,
    Other,
}

static AFRICAN_TARGETS: &[&str] = &["sw", "ha", "ig", "so"];
static INDIC_TARGETS: &[&str] = &["hi", "ta", "gu", "ml"];

/// Classifies a `src-tgt` pair by its target language.
pub fn classify_pair(language_pair: &str) -> LanguageFamily {
    let target = language_pair
        .rsplit_once('-')
        .map(|(_, t)| t)
        .unwrap_or(language_pair);
    if AFRICAN_TARGETS.contains(&target) {
        LanguageFamily::African
    } else if INDIC_TARGETS.contains(&target) {
        LanguageFamily::Indic
    } else {
        LanguageFamily::Other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupName {
    All,
    Qe,
    Top,
    TopQe,
    MxMxQe,
    NoLex,
    NoNc,
    NoNcNoLex,
    NoNcQe,
}

impl GroupName {
    pub const ALL: [GroupName; 9] = [
        GroupName::All,
        GroupName::Qe,
        GroupName::Top,
        GroupName::TopQe,
        GroupName::MxMxQe,
        GroupName::NoLex,
        GroupName::NoNc,
        GroupName::NoNcNoLex,
        GroupName::NoNcQe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupName::All => "all",
            GroupName::Qe => "qe",
            GroupName::Top => "top",
            GroupName::TopQe => "topQe",
            GroupName::MxMxQe => "mxmxqe",
            GroupName::NoLex => "noLex",
            GroupName::NoNc => "noNC",
            GroupName::NoNcNoLex => "noNCnoLex",
            GroupName::NoNcQe => "noNCQe",
        }
    }

    /// Members in listing order, before the language-conditional tail.
    fn base(self) -> &'static [&'static str] {
        match self {
            GroupName::All => &[
                METRICX,
                METRICX_QE,
                XCOMET_XXL,
                XCOMET_XL,
                COMETKIWI23_XXL,
                COMETKIWI23_XL,
                COMETKIWI22,
                COMET22,
                BLEURT,
                YISI,
                CHRF,
                CHRF_PP,
                SENT_BLEU,
                TER,
            ],
            GroupName::Qe => &[METRICX_QE, COMETKIWI23_XXL, COMETKIWI23_XL, COMETKIWI22],
            GroupName::Top => &[
                METRICX,
                METRICX_QE,
                XCOMET_XXL,
                XCOMET_XL,
                COMETKIWI23_XXL,
                COMETKIWI23_XL,
            ],
            GroupName::TopQe => &[METRICX_QE, COMETKIWI23_XXL, COMETKIWI23_XL],
            GroupName::MxMxQe => &[METRICX, METRICX_QE],
            GroupName::NoLex => &[
                METRICX,
                METRICX_QE,
                XCOMET_XXL,
                XCOMET_XL,
                COMETKIWI23_XXL,
                COMETKIWI23_XL,
                COMETKIWI22,
                COMET22,
                BLEURT,
                YISI,
            ],
            GroupName::NoNc => &[
                METRICX,
                METRICX_QE,
                COMETKIWI22,
                COMET22,
                BLEURT,
                YISI,
                CHRF,
                CHRF_PP,
                SENT_BLEU,
                TER,
            ],
            GroupName::NoNcNoLex => &[METRICX, METRICX_QE, COMET22, BLEURT, YISI],
            GroupName::NoNcQe => &[METRICX_QE],
        }
    }

    fn african_tail(self) -> &'static [&'static str] {
        match self {
            GroupName::All | GroupName::NoLex | GroupName::NoNc | GroupName::NoNcNoLex => {
                &[AFRICOMET, AFRICOMET_QE]
            }
            GroupName::Qe | GroupName::NoNcQe => &[AFRICOMET_QE],
            _ => &[],
        }
    }

    fn indic_tail(self) -> &'static [&'static str] {
        match self {
            GroupName::All | GroupName::NoLex | GroupName::NoNc | GroupName::NoNcNoLex => {
                &[INDICCOMET]
            }
            _ => &[],
        }
    }

    pub fn members(self, language_pair: &str) -> Vec<&'static str> {
        let mut out = self.base().to_vec();
        match classify_pair(language_pair) {
            LanguageFamily::African => out.extend_from_slice(self.african_tail()),
            LanguageFamily::Indic => out.extend_from_slice(self.indic_tail()),
            LanguageFamily::Other => {}
        }
        out
    }

    /// Members restricted to one metric kind, keeping listing order.
    pub fn members_of_kind(self, language_pair: &str, kind: MetricKind) -> Vec<&'static str> {
        self.members(language_pair)
            .into_iter()
            .filter(|id| lookup(id).map(|s| s.kind == kind).unwrap_or(false))
            .collect()
    }
}

impl FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupName::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::UnknownGroup(s.to_string()))
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn group_members(name: &str, language_pair: &str) -> Result<Vec<&'static str>> {
    Ok(name.parse::<GroupName>()?.members(language_pair))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientations_follow_the_roster() {
        let ter = lookup("TER").unwrap();
        assert_eq!(ter.kind, MetricKind::ReferenceBased);
        assert_eq!(ter.orientation, Orientation::LowerBetter);

        let chrf = lookup("chrF").unwrap();
        assert_eq!(chrf.kind, MetricKind::ReferenceBased);
        assert_eq!(chrf.orientation, Orientation::HigherBetter);

        let kiwi = lookup("CometKiwi22").unwrap();
        assert_eq!(kiwi.kind, MetricKind::Qe);
        assert_eq!(kiwi.orientation, Orientation::HigherBetter);

        let lower: Vec<_> = METRICS
            .iter()
            .filter(|s| s.orientation == Orientation::LowerBetter)
            .map(|s| s.id)
            .collect();
        assert_eq!(lower, vec![METRICX, TER, METRICX_QE]);
    }

    #[test]
    fn roster_counts() {
        let reference = METRICS
            .iter()
            .filter(|s| s.kind == MetricKind::ReferenceBased)
            .count();
        assert_eq!(reference, 12);
        assert_eq!(METRICS.len() - reference, 5);
    }

    #[test]
    fn unknown_metric_names_the_id() {
        let err = lookup("Meteor").unwrap_err();
        assert!(matches!(err, Error::UnknownMetric(ref id) if id == "Meteor"));
    }

    #[test]
    fn aliases_normalize() {
        assert_eq!(canonical_id("metricx").unwrap(), METRICX);
        assert_eq!(canonical_id("YiSi-1").unwrap(), YISI);
        // ids are case-sensitive; only listed aliases resolve
        assert!(canonical_id("CHRF").is_err());
    }

    #[test]
    fn group_examples() {
        assert_eq!(
            group_members("mxmxqe", "en-de").unwrap(),
            vec![METRICX, METRICX_QE]
        );
        assert_eq!(
            group_members("topQe", "zh-en").unwrap(),
            vec![METRICX_QE, COMETKIWI23_XXL, COMETKIWI23_XL]
        );
        assert_eq!(group_members("noNCQe", "en-de").unwrap(), vec![METRICX_QE]);
        assert_eq!(
            group_members("noNCQe", "en-sw").unwrap(),
            vec![METRICX_QE, AFRICOMET_QE]
        );
        assert!(matches!(
            group_members("best", "en-de"),
            Err(Error::UnknownGroup(_))
        ));
    }

    #[test]
    fn language_conditional_members() {
        let all_de = group_members("all", "en-de").unwrap();
        assert_eq!(all_de.len(), 14);
        assert!(!all_de.contains(&AFRICOMET) && !all_de.contains(&INDICCOMET));

        let all_sw = group_members("all", "en-sw").unwrap();
        assert_eq!(&all_sw[14..], &[AFRICOMET, AFRICOMET_QE]);

        let all_hi = group_members("all", "en-hi").unwrap();
        assert_eq!(&all_hi[14..], &[INDICCOMET]);

        assert_eq!(
            group_members("qe", "en-ha").unwrap().last(),
            Some(&AFRICOMET_QE)
        );
        assert_eq!(group_members("top", "en-ig").unwrap().len(), 6);
    }

    #[test]
    fn pair_classification() {
        for p in ["en-sw", "en-ha", "en-ig", "en-so"] {
            assert_eq!(classify_pair(p), LanguageFamily::African);
        }
        for p in ["en-hi", "en-ta", "en-gu", "en-ml"] {
            assert_eq!(classify_pair(p), LanguageFamily::Indic);
        }
        for p in ["en-de", "zh-en", "en-hu", "en-vi", "xx"] {
            assert_eq!(classify_pair(p), LanguageFamily::Other);
        }
    }

    #[test]
    fn every_member_resolves_and_groups_are_consistent() {
        let lexical = [CHRF, CHRF_PP, SENT_BLEU, TER];
        for pair in ["en-de", "en-sw", "en-hi", "zh-en"] {
            for g in GroupName::ALL {
                let members = g.members(pair);
                let mut dedup = members.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), members.len(), "{g} duplicates");
                for m in &members {
                    lookup(m).unwrap();
                }
            }
            for m in GroupName::Qe.members(pair) {
                assert_eq!(lookup(m).unwrap().kind, MetricKind::Qe);
            }
            for g in [GroupName::NoLex, GroupName::NoNcNoLex] {
                assert!(g.members(pair).iter().all(|m| !lexical.contains(m)));
            }
        }
    }
}

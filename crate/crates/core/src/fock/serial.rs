//! JSON documents for layouts and states.
//!
//! ```json
//! {"layout": {"M": 1, "d": 2},
//!  "amplitudes": [{"occupations": [1, 0], "re": 0.6, "im": 0.0}, ...]}
//! ```
//! Mixtures are `{"components": [{"weight": w, "state": <pure>}, ...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MixedState, ModeLayout, OccupationVector, PureState};
use crate::error::Error;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LayoutDoc {
    #[serde(rename = "M")]
    pub num_systems: usize,
    pub d: usize,
}

impl TryFrom<LayoutDoc> for ModeLayout {
    type Error = Error;
    fn try_from(doc: LayoutDoc) -> Result<Self, Error> {
        ModeLayout::new(doc.num_systems, doc.d)
    }
}

impl From<ModeLayout> for LayoutDoc {
    fn from(l: ModeLayout) -> Self {
        Self {
            num_systems: l.num_systems(),
            d: l.num_internal(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub occupations: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PureStateDoc {
    pub layout: LayoutDoc,
    pub amplitudes: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub weight: f64,
    pub state: PureStateDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixedStateDoc {
    pub components: Vec<ComponentDoc>,
}

impl From<&PureState> for PureStateDoc {
    fn from(s: &PureState) -> Self {
        Self {
            layout: (*s.layout()).into(),
            amplitudes: s
                .iter()
                .map(|(k, a)| TermDoc {
                    occupations: k.counts().to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<PureStateDoc> for PureState {
    type Error = Error;
    fn try_from(doc: PureStateDoc) -> Result<Self, Error> {
        let layout = ModeLayout::try_from(doc.layout)?;
        PureState::from_amplitudes(
            layout,
            doc.amplitudes
                .into_iter()
                .map(|t| (OccupationVector::new(t.occupations), Complex64::new(t.re, t.im))),
        )
    }
}

impl From<&MixedState> for MixedStateDoc {
    fn from(m: &MixedState) -> Self {
        Self {
            components: m
                .components()
                .iter()
                .map(|(w, s)| ComponentDoc {
                    weight: *w,
                    state: s.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<MixedStateDoc> for MixedState {
    type Error = Error;
    fn try_from(doc: MixedStateDoc) -> Result<Self, Error> {
        let comps = doc
            .components
            .into_iter()
            .map(|c| Ok((c.weight, PureState::try_from(c.state)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        MixedState::new(comps)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PureStateDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = PureStateDoc::deserialize(d)?;
        PureState::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Serialize for MixedState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MixedStateDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MixedState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = MixedStateDoc::deserialize(d)?;
        MixedState::try_from(doc).map_err(serde::de::Error::custom)
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::coefficients::NonlinearKind;
use crate::error::{Error, Result};

/// Parameterization through which a dynamic is specified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceMode {
    Difficulty,
    Normalized,
    Physical,
}

impl InterfaceMode {
    pub const ALL: [InterfaceMode; 3] = [Self::Difficulty, Self::Normalized, Self::Physical];

    /// Prefix used in scenario ids.
    pub fn prefix(self) -> &'static str {
        match self {
            Self::Difficulty => "diff",
            Self::Normalized => "norm",
            Self::Physical => "phy",
        }
    }

    pub fn from_prefix(prefix: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.prefix() == prefix)
    }
}

impl fmt::Display for InterfaceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// Named benchmark dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamic {
    Adv,
    Diff,
    AdvDiff,
    Disp,
    Hyp,
    UnbalAdv,
    DiagDiff,
    AnisoDiff,
    MixDisp,
    MixHyp,
    Burgers,
    BurgersSc,
    Kdv,
    KsCons,
    Ks,
    Fisher,
    Gs,
    /// Gray-Scott parameterized by a named pattern type.
    GsType,
    Sh,
    DecayTurb,
    KolmFlow,
}

impl Dynamic {
    /// Registry order; `GsType` is an alternative interface to `Gs` and not listed.
    pub const LISTED: [Dynamic; 20] = [
        Self::Adv,
        Self::Diff,
        Self::AdvDiff,
        Self::Disp,
        Self::Hyp,
        Self::UnbalAdv,
        Self::DiagDiff,
        Self::AnisoDiff,
        Self::MixDisp,
        Self::MixHyp,
        Self::Burgers,
        Self::BurgersSc,
        Self::Kdv,
        Self::KsCons,
        Self::Ks,
        Self::Fisher,
        Self::Gs,
        Self::Sh,
        Self::DecayTurb,
        Self::KolmFlow,
    ];

    pub const ALL: [Dynamic; 21] = [
        Self::Adv,
        Self::Diff,
        Self::AdvDiff,
        Self::Disp,
        Self::Hyp,
        Self::UnbalAdv,
        Self::DiagDiff,
        Self::AnisoDiff,
        Self::MixDisp,
        Self::MixHyp,
        Self::Burgers,
        Self::BurgersSc,
        Self::Kdv,
        Self::KsCons,
        Self::Ks,
        Self::Fisher,
        Self::Gs,
        Self::GsType,
        Self::Sh,
        Self::DecayTurb,
        Self::KolmFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Adv => "adv",
            Self::Diff => "diff",
            Self::AdvDiff => "adv_diff",
            Self::Disp => "disp",
            Self::Hyp => "hyp",
            Self::UnbalAdv => "unbal_adv",
            Self::DiagDiff => "diag_diff",
            Self::AnisoDiff => "aniso_diff",
            Self::MixDisp => "mix_disp",
            Self::MixHyp => "mix_hyp",
            Self::Burgers => "burgers",
            Self::BurgersSc => "burgers_sc",
            Self::Kdv => "kdv",
            Self::KsCons => "ks_cons",
            Self::Ks => "ks",
            Self::Fisher => "fisher",
            Self::Gs => "gs",
            Self::GsType => "gs_type",
            Self::Sh => "sh",
            Self::DecayTurb => "decay_turb",
            Self::KolmFlow => "kolm_flow",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::Adv => "Advection",
            Self::Diff => "Diffusion",
            Self::AdvDiff => "Advection-Diffusion",
            Self::Disp => "Dispersion",
            Self::Hyp => "Hyper-Diffusion",
            Self::UnbalAdv => "Unbalanced Advection",
            Self::DiagDiff => "Diagonal Diffusion",
            Self::AnisoDiff => "Anisotropic Diffusion",
            Self::MixDisp => "Spatially-Mixed Dispersion",
            Self::MixHyp => "Spatially-Mixed Hyper-Diffusion",
            Self::Burgers => "Burgers",
            Self::BurgersSc => "Burgers (single-channel)",
            Self::Kdv => "Korteweg-de Vries (single-channel)",
            Self::KsCons => "Kuramoto-Sivashinsky (conservative)",
            Self::Ks => "Kuramoto-Sivashinsky (combustion)",
            Self::Fisher => "Fisher-KPP",
            Self::Gs => "Gray-Scott",
            Self::GsType => "Gray-Scott (pattern type)",
            Self::Sh => "Swift-Hohenberg",
            Self::DecayTurb => "Navier-Stokes (decaying turbulence)",
            Self::KolmFlow => "Navier-Stokes (Kolmogorov forcing)",
        }
    }

    /// Class tags: L(inear)/N(onlinear), D(ecaying), I(nfinitely active),
    /// S(teady state), C(haotic), M(ulti-channel).
    pub fn class(self) -> &'static str {
        match self {
            Self::Adv | Self::Disp | Self::UnbalAdv | Self::MixDisp | Self::MixHyp => "L-I",
            Self::Diff | Self::AdvDiff | Self::Hyp | Self::DiagDiff | Self::AnisoDiff => "L-D",
            Self::Burgers => "N-D-M",
            Self::BurgersSc | Self::Kdv | Self::DecayTurb => "N-D",
            Self::KsCons | Self::Ks | Self::KolmFlow => "N-I-C",
            Self::Fisher | Self::Sh => "N-S",
            Self::Gs | Self::GsType => "N-S/C/I-M",
        }
    }

    pub fn dims(self) -> &'static [usize] {
        match self {
            Self::Adv
            | Self::Diff
            | Self::AdvDiff
            | Self::Disp
            | Self::Hyp
            | Self::Burgers
            | Self::Kdv
            | Self::Ks
            | Self::Fisher => &[1, 2, 3],
            Self::UnbalAdv
            | Self::DiagDiff
            | Self::AnisoDiff
            | Self::MixDisp
            | Self::MixHyp
            | Self::BurgersSc
            | Self::Gs
            | Self::GsType
            | Self::Sh => &[2, 3],
            Self::KsCons => &[1],
            Self::DecayTurb | Self::KolmFlow => &[2],
        }
    }

    pub fn supports_dims(self, dims: usize) -> bool {
        self.dims().contains(&dims)
    }

    /// Whether the dynamic is expressible through isotropic `gamma`/`delta` coefficients.
    pub fn is_isotropic(self) -> bool {
        self.nonlinear_kind().is_some()
            || matches!(self, Self::Adv | Self::Diff | Self::AdvDiff | Self::Disp | Self::Hyp)
    }

    pub fn supports_mode(self, mode: InterfaceMode) -> bool {
        mode == InterfaceMode::Physical || self.is_isotropic()
    }

    pub fn preferred_mode(self) -> InterfaceMode {
        if self.is_isotropic() {
            InterfaceMode::Difficulty
        } else {
            InterfaceMode::Physical
        }
    }

    pub fn modes(self) -> Vec<InterfaceMode> {
        InterfaceMode::ALL
            .into_iter()
            .filter(|&m| self.supports_mode(m))
            .collect()
    }

    /// Nonlinear component of the isotropic dynamics.
    pub fn nonlinear_kind(self) -> Option<NonlinearKind> {
        match self {
            Self::Burgers | Self::KsCons => Some(NonlinearKind::Conv),
            Self::BurgersSc | Self::Kdv => Some(NonlinearKind::ConvSc),
            Self::Ks => Some(NonlinearKind::Gn),
            Self::Fisher => Some(NonlinearKind::Quad),
            _ => None,
        }
    }

    /// State channels for a `dims`-dimensional instance.
    pub fn channels(self, dims: usize) -> usize {
        match self {
            Self::Burgers => dims,
            Self::Gs | Self::GsType => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }
}

impl fmt::Display for Dynamic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dynamic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s).ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// One `(dynamic, dimension)` registry row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicDescriptor {
    pub name: String,
    pub title: String,
    pub num_dims: usize,
    pub class: String,
    pub preferred_mode: InterfaceMode,
    pub modes: Vec<InterfaceMode>,
    pub channels: usize,
}

/// Every `(dynamic, dimension)` pair of the benchmark.
pub fn registry_list() -> Vec<DynamicDescriptor> {
    Dynamic::LISTED
        .iter()
        .flat_map(|&d| {
            d.dims().iter().map(move |&dims| DynamicDescriptor {
                name: d.name().to_string(),
                title: d.title().to_string(),
                num_dims: dims,
                class: d.class().to_string(),
                preferred_mode: d.preferred_mode(),
                modes: d.modes(),
                channels: d.channels(dims),
            })
        })
        .collect()
}

/// A parsed `[mode_]name` scenario id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScenarioId {
    pub dynamic: Dynamic,
    pub mode: InterfaceMode,
}

impl ScenarioId {
    /// Parses `[mode_]name`; without a prefix the preferred mode is used.
    pub fn parse(id: &str) -> Result<Self> {
        if let Some((prefix, rest)) = id.split_once('_') {
            if let (Some(mode), Some(dynamic)) = (InterfaceMode::from_prefix(prefix), Dynamic::from_name(rest)) {
                return Ok(Self { dynamic, mode });
            }
        }
        let dynamic = Dynamic::from_name(id).ok_or_else(|| Error::UnknownScenario(id.to_string()))?;
        Ok(Self {
            dynamic,
            mode: dynamic.preferred_mode(),
        })
    }

    /// `<D>d_<mode>_<name>`
    pub fn canonical_name(&self, num_dims: usize) -> String {
        format!("{num_dims}d_{}_{}", self.mode.prefix(), self.dynamic.name())
    }

    pub fn check(&self, num_dims: usize) -> Result<()> {
        if !self.dynamic.supports_mode(self.mode) {
            return Err(Error::UnsupportedMode(format!("{}_{}", self.mode, self.dynamic)));
        }
        if !self.dynamic.supports_dims(num_dims) {
            return Err(Error::UnknownScenario(format!(
                "{} is not available in {num_dims}d",
                self.dynamic
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn forty_six_entries() {
        let list = registry_list();
        assert_eq!(list.len(), 46);
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for d in &list {
            *counts.entry(d.name.as_str()).or_default() += 1;
        }
        assert_eq!(counts["kolm_flow"], 1);
        assert_eq!(counts["burgers"], 3);
        assert_eq!(counts["ks_cons"], 1);
        assert_eq!(counts["gs"], 2);
        assert!(list.iter().filter(|d| d.name == "kolm_flow").all(|d| d.num_dims == 2));
    }

    #[test]
    fn parses_ids() {
        assert_eq!(
            ScenarioId::parse("diff_burgers").unwrap(),
            ScenarioId { dynamic: Dynamic::Burgers, mode: InterfaceMode::Difficulty }
        );
        // the dynamic named diff without any prefix
        assert_eq!(ScenarioId::parse("diff").unwrap().dynamic, Dynamic::Diff);
        assert_eq!(
            ScenarioId::parse("diff_diff").unwrap(),
            ScenarioId { dynamic: Dynamic::Diff, mode: InterfaceMode::Difficulty }
        );
        // a name that starts like a mode prefix
        assert_eq!(ScenarioId::parse("adv_diff").unwrap().dynamic, Dynamic::AdvDiff);
        assert_eq!(ScenarioId::parse("phy_gs_type").unwrap().dynamic, Dynamic::GsType);
        assert_eq!(ScenarioId::parse("gs").unwrap().mode, InterfaceMode::Physical);
        assert!(matches!(ScenarioId::parse("diff_nope"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn canonical_names() {
        assert_eq!(ScenarioId::parse("diff_burgers").unwrap().canonical_name(3), "3d_diff_burgers");
        assert_eq!(ScenarioId::parse("ks").unwrap().canonical_name(1), "1d_diff_ks");
    }

    #[test]
    fn physical_only_dynamics_reject_difficulty_mode() {
        let id = ScenarioId::parse("diff_aniso_diff").unwrap();
        let err = id.check(2).unwrap_err();
        assert!(matches!(err, Error::UnsupportedMode(_)));
        assert!(err.to_string().contains("mode unsupported for dynamic"));
        assert!(ScenarioId::parse("kolm_flow").unwrap().check(3).is_err());
    }
}

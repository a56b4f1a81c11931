use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Geographic bucket a count is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    World,
    Us,
    ChineseMainland,
    Other,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::World, Region::Us, Region::ChineseMainland, Region::Other];

    /// The three disjoint regions whose counts add up to the world.
    pub const PARTS: [Region; 3] = [Region::Us, Region::ChineseMainland, Region::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::World => "world",
            Region::Us => "us",
            Region::ChineseMainland => "chinese-mainland",
            Region::Other => "other",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown region `{0}`")]
pub struct UnknownRegion(pub String);

impl FromStr for Region {
    type Err = UnknownRegion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Region::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRegion(s.to_string()))
    }
}

/// Subject category of a count.
///
/// The 21 ESI fields and `cross-field` are in alphabetical order; that order
/// is the canonical alignment for paired series. `Total` is a reserved
/// aggregate row standing for a region-year total across every category
/// (cross-field included), used when no per-field breakdown is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    AgriculturalSciences,
    BiologyAndBiochemistry,
    Chemistry,
    ClinicalMedicine,
    ComputerScience,
    CrossField,
    EconomicsAndBusiness,
    Engineering,
    EnvironmentAndEcology,
    Geosciences,
    Immunology,
    MaterialsScience,
    Mathematics,
    Microbiology,
    MolecularBiologyAndGenetics,
    NeuroscienceAndBehavior,
    PharmacologyAndToxicology,
    Physics,
    PlantAndAnimalScience,
    PsychiatryAndPsychology,
    SocialSciences,
    SpaceScience,
    Total,
}

impl Field {
    /// Every category a researcher can be listed under, in canonical order.
    pub const CANONICAL: [Field; 22] = [
        Field::AgriculturalSciences,
        Field::BiologyAndBiochemistry,
        Field::Chemistry,
        Field::ClinicalMedicine,
        Field::ComputerScience,
        Field::CrossField,
        Field::EconomicsAndBusiness,
        Field::Engineering,
        Field::EnvironmentAndEcology,
        Field::Geosciences,
        Field::Immunology,
        Field::MaterialsScience,
        Field::Mathematics,
        Field::Microbiology,
        Field::MolecularBiologyAndGenetics,
        Field::NeuroscienceAndBehavior,
        Field::PharmacologyAndToxicology,
        Field::Physics,
        Field::PlantAndAnimalScience,
        Field::PsychiatryAndPsychology,
        Field::SocialSciences,
        Field::SpaceScience,
    ];

    /// The 21 ESI fields (canonical order, cross-field excluded).
    pub const ESI: [Field; 21] = [
        Field::AgriculturalSciences,
        Field::BiologyAndBiochemistry,
        Field::Chemistry,
        Field::ClinicalMedicine,
        Field::ComputerScience,
        Field::EconomicsAndBusiness,
        Field::Engineering,
        Field::EnvironmentAndEcology,
        Field::Geosciences,
        Field::Immunology,
        Field::MaterialsScience,
        Field::Mathematics,
        Field::Microbiology,
        Field::MolecularBiologyAndGenetics,
        Field::NeuroscienceAndBehavior,
        Field::PharmacologyAndToxicology,
        Field::Physics,
        Field::PlantAndAnimalScience,
        Field::PsychiatryAndPsychology,
        Field::SocialSciences,
        Field::SpaceScience,
    ];

    pub fn is_esi(self) -> bool {
        !matches!(self, Field::CrossField | Field::Total)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::AgriculturalSciences => "agricultural-sciences",
            Field::BiologyAndBiochemistry => "biology-and-biochemistry",
            Field::Chemistry => "chemistry",
            Field::ClinicalMedicine => "clinical-medicine",
            Field::ComputerScience => "computer-science",
            Field::CrossField => "cross-field",
            Field::EconomicsAndBusiness => "economics-and-business",
            Field::Engineering => "engineering",
            Field::EnvironmentAndEcology => "environment-and-ecology",
            Field::Geosciences => "geosciences",
            Field::Immunology => "immunology",
            Field::MaterialsScience => "materials-science",
            Field::Mathematics => "mathematics",
            Field::Microbiology => "microbiology",
            Field::MolecularBiologyAndGenetics => "molecular-biology-and-genetics",
            Field::NeuroscienceAndBehavior => "neuroscience-and-behavior",
            Field::PharmacologyAndToxicology => "pharmacology-and-toxicology",
            Field::Physics => "physics",
            Field::PlantAndAnimalScience => "plant-and-animal-science",
            Field::PsychiatryAndPsychology => "psychiatry-and-psychology",
            Field::SocialSciences => "social-sciences",
            Field::SpaceScience => "space-science",
            Field::Total => "total",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown field `{0}`")]
pub struct UnknownField(pub String);

impl FromStr for Field {
    type Err = UnknownField;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::CANONICAL
            .into_iter()
            .chain(std::iter::once(Field::Total))
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownField(s.to_string()))
    }
}

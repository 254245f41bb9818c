//! Catalog of the matrix groups, their Lie algebra bases, Cartan
//! decompositions, the U(n) embedding, sampling and membership diagnostics.

mod bases;
mod sample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bases::{basis_g, cartan_decomposition, generator, AlgebraBasis, BasisField, GeneratorKind};
pub use sample::{
    embed_un, membership_check, point_from_coeffs, sample, sample_dual, DualSample, GroupSample,
    MembershipReport,
};

/// Matrix group families. Matrix size is `n` for SO/SU and `2n` for the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupFamily {
    SO,
    SU,
    Sp,
    /// U(n) embedded in SO(2n) by `x + iy ↦ [[x, y], [−y, x]]`.
    UInSO2n,
    /// U(n) embedded in Sp(n), same block map.
    UInSpn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
    pub n: usize,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("{family}({n}): n must be at least 2")));
        }
        Ok(GroupSpec { family, n })
    }

    pub fn matrix_size(&self) -> usize {
        match self.family {
            GroupFamily::SO | GroupFamily::SU => self.n,
            GroupFamily::Sp | GroupFamily::UInSO2n | GroupFamily::UInSpn => 2 * self.n,
        }
    }

    pub fn dimension(&self) -> usize {
        let n = self.n;
        match self.family {
            GroupFamily::SO => n * (n - 1) / 2,
            GroupFamily::SU => n * n - 1,
            GroupFamily::Sp => n * (2 * n + 1),
            GroupFamily::UInSO2n | GroupFamily::UInSpn => n * n,
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupFamily::SO => "SO",
            GroupFamily::SU => "SU",
            GroupFamily::Sp => "Sp",
            GroupFamily::UInSO2n => "U_in_SO2n",
            GroupFamily::UInSpn => "U_in_Spn",
        })
    }
}

impl FromStr for GroupFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SO" => Ok(GroupFamily::SO),
            "SU" => Ok(GroupFamily::SU),
            "Sp" => Ok(GroupFamily::Sp),
            "U_in_SO2n" => Ok(GroupFamily::UInSO2n),
            "U_in_Spn" => Ok(GroupFamily::UInSpn),
            _ => Err(Error::Usage(format!("unknown group family '{s}'"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.n)
    }
}

/// The four compact symmetric space families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceFamily {
    SUnSOn,
    SpnUn,
    SO2nUn,
    SU2nSpn,
}

impl SpaceFamily {
    pub const ALL: [SpaceFamily; 4] =
        [SpaceFamily::SUnSOn, SpaceFamily::SpnUn, SpaceFamily::SO2nUn, SpaceFamily::SU2nSpn];
}

impl fmt::Display for SpaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceFamily::SUnSOn => "SUn_SOn",
            SpaceFamily::SpnUn => "Spn_Un",
            SpaceFamily::SO2nUn => "SO2n_Un",
            SpaceFamily::SU2nSpn => "SU2n_Spn",
        })
    }
}

impl FromStr for SpaceFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SUn_SOn" => Ok(SpaceFamily::SUnSOn),
            "Spn_Un" => Ok(SpaceFamily::SpnUn),
            "SO2n_Un" => Ok(SpaceFamily::SO2nUn),
            "SU2n_Spn" => Ok(SpaceFamily::SU2nSpn),
            _ => Err(Error::Usage(format!("unknown symmetric space family '{s}'"))),
        }
    }
}

/// A compact symmetric pair `(G, K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymmetricSpace {
    pub family: SpaceFamily,
    pub n: usize,
}

impl SymmetricSpace {
    pub fn new(family: SpaceFamily, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("{family}({n}): n must be at least 2")));
        }
        Ok(SymmetricSpace { family, n })
    }

    /// The ambient group `G`.
    pub fn group(&self) -> GroupSpec {
        let n = self.n;
        let (family, m) = match self.family {
            SpaceFamily::SUnSOn => (GroupFamily::SU, n),
            SpaceFamily::SpnUn => (GroupFamily::Sp, n),
            SpaceFamily::SO2nUn => (GroupFamily::SO, 2 * n),
            SpaceFamily::SU2nSpn => (GroupFamily::SU, 2 * n),
        };
        GroupSpec { family, n: m }
    }

    /// The isotropy subgroup `K`, realized inside `G`.
    pub fn subgroup(&self) -> GroupSpec {
        let family = match self.family {
            SpaceFamily::SUnSOn => GroupFamily::SO,
            SpaceFamily::SpnUn => GroupFamily::UInSpn,
            SpaceFamily::SO2nUn => GroupFamily::UInSO2n,
            SpaceFamily::SU2nSpn => GroupFamily::Sp,
        };
        GroupSpec { family, n: self.n }
    }
}

impl fmt::Display for SymmetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.n)
    }
}

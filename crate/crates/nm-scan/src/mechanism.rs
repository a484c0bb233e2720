use std::collections::BTreeMap;

use crate::error::ScanError;
use crate::order::ScanVariant;

/// How a branch's mixer output is weighted when branches are summed.
/// Transverse/Axial resolve to the resolution-scheduled pair (λ1, λ2);
/// Unit is a fixed 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchWeight {
    Transverse,
    Axial,
    Unit,
}

impl BranchWeight {
    pub fn resolve(self, lambda1: f64, lambda2: f64) -> f64 {
        match self {
            BranchWeight::Transverse => lambda1,
            BranchWeight::Axial => lambda2,
            BranchWeight::Unit => 1.0,
        }
    }
}

/// One serialization branch of the global mixer: flatten along `variant`,
/// mix, un-flatten, scale by `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanBranch {
    pub variant: ScanVariant,
    pub weight: BranchWeight,
}

impl ScanBranch {
    pub fn transverse(variant: ScanVariant) -> Self {
        ScanBranch {
            variant,
            weight: BranchWeight::Transverse,
        }
    }

    pub fn axial(variant: ScanVariant) -> Self {
        ScanBranch {
            variant,
            weight: BranchWeight::Axial,
        }
    }

    pub fn unit(variant: ScanVariant) -> Self {
        ScanBranch {
            variant,
            weight: BranchWeight::Unit,
        }
    }
}

/// A named bundle of scan branches. Implementations only describe which
/// serializations to run and how to weight them; the mixer itself lives
/// elsewhere.
pub trait ScanMechanism: Send + Sync {
    fn name(&self) -> &'static str;
    fn branches(&self) -> Vec<ScanBranch>;
}

struct Builtin {
    name: &'static str,
    branches: Vec<ScanBranch>,
}

impl ScanMechanism for Builtin {
    fn name(&self) -> &'static str {
        self.name
    }

    fn branches(&self) -> Vec<ScanBranch> {
        self.branches.clone()
    }
}

/// The mechanism used when the config names none: both crossing pairs,
/// transverse branches weighted λ1 and axial branches λ2.
pub const DEFAULT_MECHANISM: &str = "cross-both";

/// Name → mechanism lookup. `builtin()` registers the ablation family:
/// single rasters, forward+reverse pairs, crossing pairs per orientation,
/// the combined default, and a Hilbert order.
pub struct MechanismRegistry {
    entries: BTreeMap<&'static str, Box<dyn ScanMechanism>>,
}

impl MechanismRegistry {
    pub fn empty() -> Self {
        MechanismRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        use ScanVariant::*;
        let mut reg = MechanismRegistry::empty();
        let rev = |v: ScanVariant| Reverse(Box::new(v));

        reg.register(Box::new(Builtin {
            name: "uni-transverse",
            branches: vec![ScanBranch::transverse(TransversePrimary)],
        }));
        reg.register(Box::new(Builtin {
            name: "uni-axial",
            branches: vec![ScanBranch::axial(AxialPrimary)],
        }));
        reg.register(Box::new(Builtin {
            name: "bi-transverse",
            branches: vec![
                ScanBranch::transverse(TransversePrimary),
                ScanBranch::transverse(rev(TransversePrimary)),
            ],
        }));
        reg.register(Box::new(Builtin {
            name: "bi-axial",
            branches: vec![
                ScanBranch::axial(AxialPrimary),
                ScanBranch::axial(rev(AxialPrimary)),
            ],
        }));
        reg.register(Box::new(Builtin {
            name: "cross-transverse",
            branches: vec![
                ScanBranch::transverse(TransversePrimary),
                ScanBranch::transverse(TransverseCross),
            ],
        }));
        reg.register(Box::new(Builtin {
            name: "cross-axial",
            branches: vec![
                ScanBranch::axial(AxialPrimary),
                ScanBranch::axial(AxialCross),
            ],
        }));
        reg.register(Box::new(Builtin {
            name: "cross-both",
            branches: vec![
                ScanBranch::transverse(TransversePrimary),
                ScanBranch::transverse(TransverseCross),
                ScanBranch::axial(AxialPrimary),
                ScanBranch::axial(AxialCross),
            ],
        }));
        reg.register(Box::new(Builtin {
            name: "hilbert",
            branches: vec![ScanBranch::unit(Hilbert)],
        }));
        reg
    }

    pub fn register(&mut self, mech: Box<dyn ScanMechanism>) {
        self.entries.insert(mech.name(), mech);
    }

    pub fn get(&self, name: &str) -> Result<&dyn ScanMechanism, ScanError> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| ScanError::UnknownMechanism(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_are_stable() {
        let reg = MechanismRegistry::builtin();
        assert_eq!(
            reg.names(),
            vec![
                "bi-axial",
                "bi-transverse",
                "cross-axial",
                "cross-both",
                "cross-transverse",
                "hilbert",
                "uni-axial",
                "uni-transverse",
            ]
        );
        assert!(reg.get(DEFAULT_MECHANISM).is_ok());
        assert!(reg.get("diagonal").is_err());
    }

    #[test]
    fn default_mechanism_pairs_both_orientations() {
        let reg = MechanismRegistry::builtin();
        let branches = reg.get(DEFAULT_MECHANISM).unwrap().branches();
        assert_eq!(branches.len(), 4);
        assert_eq!(
            branches.iter().map(|b| b.weight).collect::<Vec<_>>(),
            vec![
                BranchWeight::Transverse,
                BranchWeight::Transverse,
                BranchWeight::Axial,
                BranchWeight::Axial,
            ]
        );
        let variants: Vec<String> = branches.iter().map(|b| b.variant.to_string()).collect();
        assert_eq!(
            variants,
            vec![
                "transverse-primary",
                "transverse-cross",
                "axial-primary",
                "axial-cross"
            ]
        );
    }

    #[test]
    fn bidirectional_mechanisms_reverse_their_raster() {
        let reg = MechanismRegistry::builtin();
        let branches = reg.get("bi-axial").unwrap().branches();
        assert_eq!(branches[1].variant.to_string(), "reverse:axial-primary");
    }

    #[test]
    fn weights_resolve_against_schedule() {
        assert_eq!(BranchWeight::Transverse.resolve(1.36, 0.64), 1.36);
        assert_eq!(BranchWeight::Axial.resolve(1.36, 0.64), 0.64);
        assert_eq!(BranchWeight::Unit.resolve(1.36, 0.64), 1.0);
    }
}

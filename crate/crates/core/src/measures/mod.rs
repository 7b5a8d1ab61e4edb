//! Segment probability measures, their clamped inverses and the function
//! classes `A`, `L⁻`, `L⁺⁺`.

pub mod builtin;
pub mod conditions;
pub mod defect;
pub mod dini;
pub mod segment;

pub use builtin::{nonmember_profile, BuiltinDensity};
pub use conditions::{
    condition_integral, measure_from_majorant, measure_from_majorant_with, ConditionKind,
    ExtendedValue, LogValue, MajorantMeasure, MajorantScale, MajorantSpec,
};
pub use defect::{
    class_a_defect, class_a_defect_with_argmax, class_a_report, inner_integral, ClassVerdict,
    DefectConfig, DefectReport,
};
pub use dini::{
    dini_modulus, modulus_of_continuity, rearranged_density, rearranged_modulus, DiniReport,
    RearrangedStep,
};
pub use segment::{inverse_distribution, InverseProfile, SegmentMeasure};

//! Words over the bracket alphabet, their monoid reduction, and the
//! height and matching statistics every other module builds on.

pub mod monoid;
pub mod profile;
pub mod word;

pub use monoid::{is_admissible, reduce, MonoidForm, StackState};
pub use profile::{
    classify, height_profile, is_balanced, unmatched_profile, Classification, HeightProfile, InadmissibleWord,
    UnmatchedProfile,
};
pub use word::{Bracket, Symbol, Word, WordError};

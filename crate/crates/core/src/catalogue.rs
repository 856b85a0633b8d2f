//! Built-in benchmark problems, embedded at compile time.

use rayon::prelude::*;

use crate::bounds::SearchGrid;
use crate::coeff::Problem;
use crate::error::Result;
use crate::verify::{self, VerificationReport, VerifyOptions};

pub const ENTRIES: &[(&str, &str)] = &[
    ("free", include_str!("../problems/free.json")),
    ("poschl_teller", include_str!("../problems/poschl_teller.json")),
    ("square_well_1", include_str!("../problems/square_well_1.json")),
    ("square_well_10", include_str!("../problems/square_well_10.json")),
    ("square_well_50", include_str!("../problems/square_well_50.json")),
    ("growing_p", include_str!("../problems/growing_p.json")),
    ("vanishing_weight", include_str!("../problems/vanishing_weight.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(name, _)| *name)
}

pub fn get(name: &str) -> Option<Problem> {
    ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| Problem::from_json(json).expect("embedded problem files parse"))
}

pub fn problems() -> Vec<Problem> {
    ENTRIES.iter().map(|(_, json)| Problem::from_json(json).expect("embedded problem files parse")).collect()
}

/// Verifies every problem; reports come back in catalogue order.
pub fn verify_all(grid: &SearchGrid, opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    problems().par_iter().map(|p| verify::validate_bounds(p, grid, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::check_hypotheses;

    #[test]
    fn all_entries_parse_and_satisfy_hypotheses() {
        for p in problems() {
            let rep = check_hypotheses(&p, 1e-8);
            assert!(rep.passes(), "{}: {:?}", p.name, rep.failures());
        }
        assert_eq!(names().count(), 7);
        assert!(get("poschl_teller").is_some());
        assert!(get("nope").is_none());
    }
}

//! Size limits for the exponential searches.

/// Environment variable that overrides the subset-enumeration limits.
pub const BUDGET_ENV: &str = "DELTA_LAB_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Bisimulation checks: `|S| + |S'|` may not exceed this.
    pub subset_states: usize,
    /// Frame validity: `|S| * |vars(f)|` may not exceed this.
    pub valuation_bits: usize,
    /// Partition refinement enumerates unions of at most this many blocks.
    pub partition_blocks: usize,
    /// Distinct abstracted atoms in a tautology check.
    pub taut_atoms: usize,
    /// Exhaustive neighborhood-frame enumeration limit.
    pub max_frame_states: usize,
    /// Exhaustive Kripke-frame enumeration limit.
    pub max_kripke_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            subset_states: 24,
            valuation_bits: 24,
            partition_blocks: 20,
            taut_atoms: 20,
            max_frame_states: 3,
            max_kripke_states: 4,
        }
    }
}

impl Budget {
    /// Defaults, with the subset-enumeration limits replaced by the value of
    /// `DELTA_LAB_BUDGET` when it is set to an integer.
    pub fn from_env() -> Budget {
        let mut budget = Budget::default();
        if let Some(limit) = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            budget = budget.with_subset_limit(limit);
        }
        budget
    }

    pub fn with_subset_limit(mut self, limit: usize) -> Budget {
        self.subset_states = limit;
        self.valuation_bits = limit;
        self.partition_blocks = limit;
        self
    }
}

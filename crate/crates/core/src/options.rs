/// Enumeration budgets and the seed for randomized subroutines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest residue count `||P||^j` scanned directly.
    pub residue_scan: u128,
    /// Largest number of box points `q^{(l+1) m_p}` enumerated.
    pub box_points: u128,
    /// Largest number of arguments `q^m` scanned by the counting experiments.
    pub arguments: u128,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            residue_scan: 1 << 20,
            box_points: 1 << 24,
            arguments: 1 << 24,
            seed: 0,
        }
    }
}

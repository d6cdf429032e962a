//! Conjectured mod-2 cup-length for general `n`.
//!
//! Only the first two clauses are implemented. Values of `n` that fall
//! through to the third clause get `None`.

/// The conjectured total cup-length of the oriented Grassmannian for `n`.
pub fn conjecture(n: u64) -> Option<u64> {
    for m in 2u32..62 {
        let top = 1u64 << (m + 1);
        let half = 1u64 << m;
        if top > n.saturating_add(4) {
            break;
        }
        if (top - 4..=top + half - 6).contains(&n) {
            return Some(top - 3);
        }
        let base = top + half - 5;
        if (base..=base + 2).contains(&n) {
            return Some(top - 3 + (n - base));
        }
    }
    None
}

/// `cup_im_p + 1 == conjecture`, reported only when both sides are known.
pub fn matches(special: bool, cup_im_p: u64, conjecture: Option<u64>) -> Option<bool> {
    if !special {
        return None;
    }
    conjecture.map(|c| cup_im_p + 1 == c)
}

//! Named seed derivation: every random stage gets its own stream from the
//! master seed and a stage name, independent of scheduling order.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(stage)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_and_distinct() {
        assert_eq!(derive_seed(7, "ga"), derive_seed(7, "ga"));
        assert_ne!(derive_seed(7, "ga"), derive_seed(7, "folds"));
        assert_ne!(derive_seed(7, "ga"), derive_seed(8, "ga"));
        // pinned so file outputs stay stable across releases
        assert_eq!(
            derive_seed(0, ""),
            splitmix64(splitmix64(0xcbf2_9ce4_8422_2325))
        );
    }
}

use core::fmt;

/// Classical spin configuration packed into a `u64`: bit `i` set means
/// `s_i = +1`, cleared means `s_i = -1`. The vertex count lives with the
/// graph; a configuration fits an `n`-vertex graph when no bit at or above
/// `n` is set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct SpinConfig(pub u64);

impl SpinConfig {
    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All spins up on `n` vertices.
    #[inline]
    pub const fn all_up(n: usize) -> Self {
        SpinConfig(mask(n))
    }

    #[inline]
    pub const fn spin(self, i: usize) -> i32 {
        if (self.0 >> i) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub const fn up(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    #[inline]
    pub const fn flip(self, i: usize) -> Self {
        SpinConfig(self.0 ^ (1 << i))
    }

    #[inline]
    pub const fn flip_pair(self, i: usize, j: usize) -> Self {
        SpinConfig(self.0 ^ (1 << i) ^ (1 << j))
    }

    /// Global spin inversion on `n` vertices.
    #[inline]
    pub const fn inverted(self, n: usize) -> Self {
        SpinConfig(!self.0 & mask(n))
    }

    #[inline]
    pub const fn fits(self, n: usize) -> bool {
        self.0 & !mask(n) == 0
    }

    pub fn hamming(self, other: SpinConfig) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

impl fmt::LowerHex for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Low `n` bits set.
#[inline]
pub const fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

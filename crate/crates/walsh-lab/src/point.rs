//! Points of the Walsh group at finite resolution.
//!
//! The Walsh group is the countable product of the two-element group: an
//! element is a 0/1 sequence `x = (x_0, x_1, ...)` and addition is
//! coordinatewise mod 2. Everything this crate computes only ever looks at
//! the first `m` coordinates for some finite resolution `m`, so a point is
//! stored as a machine word with bit `k` holding the coordinate `x_k`.
//! Group addition is then a single `xor`, and the coordinate-reversal map
//! `tau` is a masked bit reversal.

/// A group element truncated to its first `resolution` coordinates.
///
/// Bit `k` of `bits` is the coordinate `x_k`, so the anchor of a dyadic
/// interval of rank `n` is obtained by masking the low `n` bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupPoint {
    bits: u64,
    resolution: u32,
}

impl GroupPoint {
    /// Builds a point from raw coordinate bits.
    ///
    /// Panics if `resolution` exceeds 64 or if `bits` uses coordinates at or
    /// beyond `resolution`.
    pub fn new(bits: u64, resolution: u32) -> Self {
        assert!(resolution <= 64, "resolution {resolution} exceeds the machine word");
        assert!(
            resolution == 64 || bits >> resolution == 0,
            "bits 0x{bits:x} have coordinates beyond resolution {resolution}"
        );
        GroupPoint { bits, resolution }
    }

    /// The group identity: all coordinates zero.
    pub fn zero(resolution: u32) -> Self {
        Self::new(0, resolution)
    }

    /// The point `e_n` whose only nonzero coordinate is `x_n = 1`.
    pub fn e(n: u32, resolution: u32) -> Self {
        assert!(n < resolution, "e_{n} is not representable at resolution {resolution}");
        Self::new(1 << n, resolution)
    }

    /// Interprets a grid cell index as the anchor of a rank-`resolution`
    /// coset: bit `k` of `index` becomes coordinate `x_k`.
    pub fn from_index(index: usize, resolution: u32) -> Self {
        Self::new(index as u64, resolution)
    }

    /// The cell index of this point on a rank-`resolution` grid.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Coordinate `x_k` as 0 or 1. Panics if `k` is out of range.
    pub fn bit(&self, k: u32) -> u64 {
        assert!(k < self.resolution, "coordinate {k} beyond resolution {}", self.resolution);
        (self.bits >> k) & 1
    }

    /// Group addition: coordinatewise sum mod 2.
    ///
    /// Panics if the two points live at different resolutions; truncation
    /// would silently change the sum, so the caller must align first.
    pub fn xor_add(&self, other: &GroupPoint) -> GroupPoint {
        assert_eq!(
            self.resolution, other.resolution,
            "xor_add needs matching resolutions"
        );
        GroupPoint {
            bits: self.bits ^ other.bits,
            resolution: self.resolution,
        }
    }

    /// The coordinate-reversal transform `tau_A`: the first `A` coordinates
    /// are written in reverse order, the rest are untouched,
    ///
    /// ```text
    /// tau_A(x) = (x_{A-1}, ..., x_1, x_0, x_A, x_{A+1}, ...).
    /// ```
    ///
    /// It is an involution and maps every rank-`A` coset onto a rank-`A`
    /// coset, so it preserves the measure of dyadic sets.
    pub fn tau(&self, a: u32) -> GroupPoint {
        assert!(a <= self.resolution, "tau_{a} exceeds resolution {}", self.resolution);
        if a == 0 {
            return *self;
        }
        let mask = if a == 64 { u64::MAX } else { (1u64 << a) - 1 };
        let reversed = (self.bits & mask).reverse_bits() >> (64 - a);
        GroupPoint {
            bits: (self.bits & !mask) | reversed,
            resolution: self.resolution,
        }
    }

    /// Truncates to the first `rank` coordinates.
    pub fn truncate(&self, rank: u32) -> GroupPoint {
        assert!(rank <= self.resolution);
        let mask = if rank == 64 { u64::MAX } else { (1u64 << rank) - 1 };
        GroupPoint {
            bits: self.bits & mask,
            resolution: rank,
        }
    }
}

impl std::fmt::Debug for GroupPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for k in 0..self.resolution.min(16) {
            write!(f, "{}", (self.bits >> k) & 1)?;
        }
        if self.resolution > 16 {
            write!(f, "..")?;
        }
        write!(f, ")@{}", self.resolution)
    }
}

/// The dyadic interval `I_n(x)`: all points agreeing with `x` on the first
/// `n` coordinates. Its Haar measure is `2^-n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    anchor: GroupPoint,
    rank: u32,
}

impl DyadicInterval {
    /// The interval of rank `rank` containing `x`. Coordinates of `x` at and
    /// beyond `rank` are irrelevant and are masked away.
    pub fn containing(x: &GroupPoint, rank: u32) -> Self {
        assert!(rank <= x.resolution(), "rank {rank} exceeds the point's resolution");
        DyadicInterval {
            anchor: x.truncate(rank),
            rank,
        }
    }

    /// `I_n = I_n(0)`, the rank-`n` interval at the identity.
    pub fn at_zero(rank: u32) -> Self {
        DyadicInterval {
            anchor: GroupPoint::zero(rank),
            rank,
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn anchor(&self) -> GroupPoint {
        self.anchor
    }

    pub fn measure(&self) -> f64 {
        (0.5f64).powi(self.rank as i32)
    }

    /// Membership test: does `x` agree with the anchor on the first `rank`
    /// coordinates?
    pub fn contains(&self, x: &GroupPoint) -> bool {
        assert!(x.resolution() >= self.rank);
        x.truncate(self.rank).bits() == self.anchor.bits()
    }
}

// ===== tests

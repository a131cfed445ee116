//! Scalar edge weights.
//!
//! Every algorithm in the crate is generic over [`Weight`]. A weight must fit
//! into a single machine word so it can travel inside a CONGEST message, and it
//! must admit a total order (floats are compared with `total_cmp`, NaN is
//! rejected at graph construction).

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{NumCast, One, Zero};

pub trait Weight:
    Copy + PartialOrd + Debug + Display + FromStr + NumCast + Zero + One + Send + Sync + 'static
{
    /// Lossless encoding into one message word.
    fn to_word(self) -> u64;

    fn from_word(word: u64) -> Self;

    fn total_cmp(&self, other: &Self) -> Ordering;

    /// `false` for values that cannot take part in a total order (NaN).
    fn is_valid(&self) -> bool {
        true
    }
}

macro_rules! impl_weight_unsigned {
    ($($t:ty),*) => {
        $(
            impl Weight for $t {
                #[inline]
                fn to_word(self) -> u64 {
                    self as u64
                }
                #[inline]
                fn from_word(word: u64) -> Self {
                    word as $t
                }
                #[inline]
                fn total_cmp(&self, other: &Self) -> Ordering {
                    self.cmp(other)
                }
            }
        )*
    };
}

impl_weight_unsigned!(u32, u64);

impl Weight for i64 {
    #[inline]
    fn to_word(self) -> u64 {
        self as u64
    }
    #[inline]
    fn from_word(word: u64) -> Self {
        word as i64
    }
    #[inline]
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

macro_rules! impl_weight_float {
    ($($t:ty => $bits:ty),*) => {
        $(
            impl Weight for $t {
                #[inline]
                fn to_word(self) -> u64 {
                    self.to_bits() as u64
                }
                #[inline]
                fn from_word(word: u64) -> Self {
                    <$t>::from_bits(word as $bits)
                }
                #[inline]
                fn total_cmp(&self, other: &Self) -> Ordering {
                    <$t>::total_cmp(self, other)
                }
                fn is_valid(&self) -> bool {
                    !self.is_nan()
                }
            }
        )*
    };
}

impl_weight_float!(f32 => u32, f64 => u64);

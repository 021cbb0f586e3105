//! Values of the Bernoulli measure: rationals `numerator / base^exponent`.

use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::Ratio;

/// An exact measure value `numerator / base^exponent` in `[0, 1]`, kept
/// reduced (the numerator is not divisible by the base unless it is zero, in
/// which case the exponent is zero too).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasureValue {
    base: u8,
    numerator: u128,
    exponent: u32,
}

impl MeasureValue {
    pub fn zero(base: u8) -> Self {
        MeasureValue { base, numerator: 0, exponent: 0 }
    }

    pub fn one(base: u8) -> Self {
        MeasureValue { base, numerator: 1, exponent: 0 }
    }

    /// `base^(-depth)`, the measure of one cylinder.
    pub fn cylinder(base: u8, depth: usize) -> Self {
        MeasureValue { base, numerator: 1, exponent: depth as u32 }
    }

    /// Builds and reduces `numerator / base^exponent`.
    pub fn new(base: u8, numerator: u128, exponent: u32) -> Result<Self> {
        let v = MeasureValue { base, numerator, exponent }.reduced();
        if v.numerator > pow(base, v.exponent)? {
            return Err(Error::Malformed(alloc::format!("measure {v} exceeds 1")));
        }
        Ok(v)
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    fn reduced(mut self) -> Self {
        let b = u128::from(self.base);
        if self.numerator == 0 {
            self.exponent = 0;
            return self;
        }
        while self.exponent > 0 && self.numerator.is_multiple_of(b) {
            self.numerator /= b;
            self.exponent -= 1;
        }
        self
    }

    /// Numerator rescaled to denominator `base^exponent` (`exponent` must not
    /// be smaller than ours).
    fn scaled_to(&self, exponent: u32) -> Result<u128> {
        self.numerator
            .checked_mul(pow(self.base, exponent - self.exponent)?)
            .ok_or(Error::Overflow)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        same_base(self, other)?;
        let e = self.exponent.max(other.exponent);
        let n = self.scaled_to(e)?.checked_add(other.scaled_to(e)?).ok_or(Error::Overflow)?;
        Ok(MeasureValue { base: self.base, numerator: n, exponent: e }.reduced())
    }

    /// `self − other`, saturating at zero.
    pub fn saturating_sub(&self, other: &Self) -> Result<Self> {
        same_base(self, other)?;
        let e = self.exponent.max(other.exponent);
        let n = self.scaled_to(e)?.saturating_sub(other.scaled_to(e)?);
        Ok(MeasureValue { base: self.base, numerator: n, exponent: e }.reduced())
    }

    pub fn to_ratio(&self) -> Result<Ratio> {
        Ok(Ratio::new(self.numerator, pow(self.base, self.exponent)?))
    }

    /// `k · self`, as a plain rational (it may exceed one).
    pub fn times(&self, k: u128) -> Result<Ratio> {
        let r = self.to_ratio()?;
        let n = r.numer().checked_mul(k).ok_or(Error::Overflow)?;
        Ok(Ratio::new(n, *r.denom()))
    }
}

fn same_base(a: &MeasureValue, b: &MeasureValue) -> Result<()> {
    if a.base == b.base {
        Ok(())
    } else {
        Err(Error::BaseMismatch { left: a.base, right: b.base })
    }
}

pub(crate) fn pow(base: u8, exponent: u32) -> Result<u128> {
    u128::from(base).checked_pow(exponent).ok_or(Error::Overflow)
}

impl PartialOrd for MeasureValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base {
            return None;
        }
        let e = self.exponent.max(other.exponent);
        Some(self.scaled_to(e).ok()?.cmp(&other.scaled_to(e).ok()?))
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}^{}", self.numerator, self.base, self.exponent)
        }
    }
}

impl fmt::Debug for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

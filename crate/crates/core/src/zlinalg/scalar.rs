//! Entry types for the elimination kernels.
//!
//! Every kernel is generic over [`Entry`]. The `i64` instance reports
//! overflow instead of wrapping; callers then rerun the same kernel over
//! `BigInt`, which never fails. Results are therefore always exact.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) type Checked<T> = Result<T, Overflow>;

pub(crate) trait Entry: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Checked<Self>;
    fn mul(&self, o: &Self) -> Checked<Self>;
    fn neg(&self) -> Checked<Self>;
    /// Compares absolute values.
    fn abs_cmp(&self, o: &Self) -> Ordering;
    /// Floor division; `o` is nonzero.
    fn div_floor(&self, o: &Self) -> Checked<Self>;
    fn is_divisor_of(&self, o: &Self) -> bool;
    /// `(g, s, t)` with `g = gcd(a, b) >= 0` and `s*a + t*b = g`.
    fn xgcd(&self, o: &Self) -> Checked<(Self, Self, Self)>;
    /// `self -= k * src`.
    fn sub_mul_assign(&mut self, k: &Self, src: &Self) -> Checked<()>;
}

impl Entry for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        // Keep clear of i64::MIN so negation and abs are always defined.
        b.to_i64().filter(|&x| x != i64::MIN)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline]
    fn add(&self, o: &Self) -> Checked<Self> {
        self.checked_add(*o).ok_or(Overflow)
    }
    #[inline]
    fn mul(&self, o: &Self) -> Checked<Self> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn neg(&self) -> Checked<Self> {
        self.checked_neg().ok_or(Overflow)
    }
    fn abs_cmp(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn div_floor(&self, o: &Self) -> Checked<Self> {
        if *o == -1 && *self == i64::MIN {
            return Err(Overflow);
        }
        Ok(Integer::div_floor(self, o))
    }
    fn is_divisor_of(&self, o: &Self) -> bool {
        // `self | o`
        if *self == 0 {
            return *o == 0;
        }
        o.checked_rem(*self).is_none_or(|r| r == 0)
    }
    fn xgcd(&self, o: &Self) -> Checked<(Self, Self, Self)> {
        let (mut r0, mut r1) = (*self as i128, *o as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0.div_euclid(r1);
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 < 0 {
            (r0, s0, t0) = (-r0, -s0, -t0);
        }
        let cv = |x: i128| i64::try_from(x).ok().filter(|&v| v != i64::MIN).ok_or(Overflow);
        Ok((cv(r0)?, cv(s0)?, cv(t0)?))
    }
    #[inline]
    fn sub_mul_assign(&mut self, k: &Self, src: &Self) -> Checked<()> {
        let p = k.checked_mul(*src).ok_or(Overflow)?;
        let v = self.checked_sub(p).ok_or(Overflow)?;
        if v == i64::MIN {
            return Err(Overflow);
        }
        *self = v;
        Ok(())
    }
}

impl Entry for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        One::is_one(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        Ok(self + o)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        Ok(self * o)
    }
    fn neg(&self) -> Checked<Self> {
        Ok(-self)
    }
    fn abs_cmp(&self, o: &Self) -> Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn div_floor(&self, o: &Self) -> Checked<Self> {
        Ok(Integer::div_floor(self, o))
    }
    fn is_divisor_of(&self, o: &Self) -> bool {
        if Zero::is_zero(self) {
            return Zero::is_zero(o);
        }
        Zero::is_zero(&(o % self))
    }
    fn xgcd(&self, o: &Self) -> Checked<(Self, Self, Self)> {
        let e = self.extended_gcd(o);
        let (g, s, t) = if Signed::is_negative(&e.gcd) {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        };
        Ok((g, s, t))
    }
    fn sub_mul_assign(&mut self, k: &Self, src: &Self) -> Checked<()> {
        *self -= k * src;
        Ok(())
    }
}

/// `dst[j] -= k * src[j]` for `j >= from`.
#[inline]
pub(crate) fn row_sub_mul<E: Entry>(dst: &mut [E], k: &E, src: &[E], from: usize) -> Checked<()> {
    if k.is_nil() {
        return Ok(());
    }
    for (d, s) in dst[from..].iter_mut().zip(&src[from..]) {
        if !s.is_nil() {
            d.sub_mul_assign(k, s)?;
        }
    }
    Ok(())
}

pub(crate) fn row_neg<E: Entry>(row: &mut [E]) -> Checked<()> {
    for x in row.iter_mut() {
        if !x.is_nil() {
            *x = x.neg()?;
        }
    }
    Ok(())
}

/// Replaces `(a, b)` by `(s*a + t*b, u*a + w*b)`.
pub(crate) fn row_combine<E: Entry>(
    a: &mut [E],
    b: &mut [E],
    (s, t, u, w): (&E, &E, &E, &E),
    from: usize,
) -> Checked<()> {
    let mut na = Vec::with_capacity(a.len() - from);
    let mut nb = Vec::with_capacity(a.len() - from);
    for (x, y) in a[from..].iter().zip(&b[from..]) {
        if x.is_nil() && y.is_nil() {
            na.push(E::nil());
            nb.push(E::nil());
            continue;
        }
        na.push(s.mul(x)?.add(&t.mul(y)?)?);
        nb.push(u.mul(x)?.add(&w.mul(y)?)?);
    }
    for (d, v) in a[from..].iter_mut().zip(na) {
        *d = v;
    }
    for (d, v) in b[from..].iter_mut().zip(nb) {
        *d = v;
    }
    Ok(())
}

pub(crate) fn to_small(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| r.iter().map(i64::from_big).collect::<Option<Vec<_>>>())
        .collect()
}

pub(crate) fn to_big_rows<E: Entry>(rows: &[Vec<E>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(Entry::to_big).collect())
        .collect()
}

/// Runs `kernel` over `i64` when the input fits, and over `BigInt` when it
/// does not or when any intermediate value overflows.
pub(crate) fn run_exact<R>(
    rows: &[Vec<BigInt>],
    small: impl FnOnce(Vec<Vec<i64>>) -> Checked<R>,
    big: impl FnOnce(Vec<Vec<BigInt>>) -> Checked<R>,
) -> R {
    if let Some(s) = to_small(rows) {
        if let Ok(r) = small(s) {
            return r;
        }
    }
    big(rows.to_vec()).expect("BigInt arithmetic cannot overflow")
}

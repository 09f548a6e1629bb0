//! Semiring carriers, arithmetic, Conway star and additive refinement.
//!
//! Seven concrete semirings are supported. Every one of them is positive,
//! Conway and has a refinement additive monoid, which is what the derivative
//! semantics and the bisimulation check rely on. Values are exact: big
//! integers, big rationals and explicit infinity markers.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("unknown semiring `{0}` (expected one of boolean, tropical, arctic, bottleneck, ext_naturals, ext_nonneg_rationals, viterbi)")]
    UnknownSemiring(String),
    #[error("carrier mismatch: {left} weight combined with {right} weight")]
    CarrierMismatch { left: SemiringId, right: SemiringId },
    #[error("malformed weight literal `{0}`")]
    Malformed(String),
    #[error("weight `{literal}` is outside the {semiring} carrier")]
    OutsideCarrier {
        literal: String,
        semiring: SemiringId,
    },
    /// Holds `[x, y, z, w]` with `x + y != z + w`.
    #[error("refinement precondition violated: {} + {} != {} + {}", .0[0], .0[1], .0[2], .0[3])]
    RefinementPrecondition(Box<[Weight; 4]>),
}

/// The closed set of supported semirings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringId {
    /// `({0,1}, or, and, 0, 1)`
    Boolean,
    /// `(N ∪ {+inf}, min, +, +inf, 0)`
    Tropical,
    /// `(N ∪ {-inf, +inf}, max, +, -inf, 0)`
    Arctic,
    /// `(Q ∪ {-inf, +inf}, max, min, -inf, +inf)`
    Bottleneck,
    /// `(N ∪ {+inf}, +, *, 0, 1)`
    ExtNaturals,
    /// `(Q>=0 ∪ {+inf}, +, *, 0, 1)`
    ExtNonnegRationals,
    /// `(Q ∩ [0,1], max, *, 0, 1)`
    Viterbi,
}

impl SemiringId {
    pub const ALL: [SemiringId; 7] = [
        SemiringId::Boolean,
        SemiringId::Tropical,
        SemiringId::Arctic,
        SemiringId::Bottleneck,
        SemiringId::ExtNaturals,
        SemiringId::ExtNonnegRationals,
        SemiringId::Viterbi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemiringId::Boolean => "boolean",
            SemiringId::Tropical => "tropical",
            SemiringId::Arctic => "arctic",
            SemiringId::Bottleneck => "bottleneck",
            SemiringId::ExtNaturals => "ext_naturals",
            SemiringId::ExtNonnegRationals => "ext_nonneg_rationals",
            SemiringId::Viterbi => "viterbi",
        }
    }

    /// Additive identity.
    pub fn zero(self) -> Weight {
        Weight(match self {
            SemiringId::Boolean => Repr::Boolean(false),
            SemiringId::Tropical => Repr::Tropical(Ext::PosInf),
            SemiringId::Arctic => Repr::Arctic(Ext::NegInf),
            SemiringId::Bottleneck => Repr::Bottleneck(Ext::NegInf),
            SemiringId::ExtNaturals => Repr::ExtNaturals(Ext::Finite(BigUint::zero())),
            SemiringId::ExtNonnegRationals => Repr::ExtRationals(Ext::Finite(BigRational::zero())),
            SemiringId::Viterbi => Repr::Viterbi(BigRational::zero()),
        })
    }

    /// Multiplicative identity.
    pub fn one(self) -> Weight {
        Weight(match self {
            SemiringId::Boolean => Repr::Boolean(true),
            SemiringId::Tropical => Repr::Tropical(Ext::Finite(BigUint::zero())),
            SemiringId::Arctic => Repr::Arctic(Ext::Finite(BigUint::zero())),
            SemiringId::Bottleneck => Repr::Bottleneck(Ext::PosInf),
            SemiringId::ExtNaturals => Repr::ExtNaturals(Ext::Finite(BigUint::one())),
            SemiringId::ExtNonnegRationals => Repr::ExtRationals(Ext::Finite(BigRational::one())),
            SemiringId::Viterbi => Repr::Viterbi(BigRational::one()),
        })
    }

    /// Whether addition is idempotent (a join in a total order).
    pub fn is_idempotent(self) -> bool {
        !matches!(
            self,
            SemiringId::ExtNaturals | SemiringId::ExtNonnegRationals
        )
    }

    /// The `+inf` element, when the carrier has one.
    pub fn infinity(self) -> Option<Weight> {
        Some(Weight(match self {
            SemiringId::Tropical => Repr::Tropical(Ext::PosInf),
            SemiringId::Arctic => Repr::Arctic(Ext::PosInf),
            SemiringId::Bottleneck => Repr::Bottleneck(Ext::PosInf),
            SemiringId::ExtNaturals => Repr::ExtNaturals(Ext::PosInf),
            SemiringId::ExtNonnegRationals => Repr::ExtRationals(Ext::PosInf),
            SemiringId::Boolean | SemiringId::Viterbi => return None,
        }))
    }

    /// Builds the weight denoted by an integer literal.
    pub fn int(self, n: i64) -> Result<Weight, SemiringError> {
        self.rational_weight(BigRational::from_integer(BigInt::from(n)), &n.to_string())
    }

    /// Builds the weight `num/den`.
    pub fn ratio(self, num: i64, den: i64) -> Result<Weight, SemiringError> {
        if den == 0 {
            return Err(SemiringError::Malformed(format!("{num}/{den}")));
        }
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        self.rational_weight(q, &format!("{num}/{den}"))
    }

    /// Parses a weight literal: `INT`, `INT/INT`, `inf` or `-inf`.
    pub fn parse_weight(self, text: &str) -> Result<Weight, SemiringError> {
        let t = text.trim();
        let malformed = || SemiringError::Malformed(text.to_string());
        let outside = || SemiringError::OutsideCarrier {
            literal: text.to_string(),
            semiring: self,
        };
        match t {
            "inf" => return self.infinity().ok_or_else(outside),
            "-inf" => {
                return match self {
                    SemiringId::Arctic => Ok(Weight(Repr::Arctic(Ext::NegInf))),
                    SemiringId::Bottleneck => Ok(Weight(Repr::Bottleneck(Ext::NegInf))),
                    _ => Err(outside()),
                }
            }
            _ => {}
        }
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (t, None),
        };
        let num = parse_int(num).ok_or_else(malformed)?;
        let den = match den {
            Some(d) => {
                let d = parse_int(d).ok_or_else(malformed)?;
                if d.is_zero() || d.is_negative() {
                    return Err(malformed());
                }
                d
            }
            None => BigInt::one(),
        };
        self.rational_weight(BigRational::new(num, den), text)
    }

    fn rational_weight(self, q: BigRational, literal: &str) -> Result<Weight, SemiringError> {
        let outside = || SemiringError::OutsideCarrier {
            literal: literal.to_string(),
            semiring: self,
        };
        let natural = |q: &BigRational| -> Option<BigUint> {
            if q.is_integer() && !q.is_negative() {
                q.to_integer().to_biguint()
            } else {
                None
            }
        };
        let repr = match self {
            SemiringId::Boolean => {
                if q.is_zero() {
                    Repr::Boolean(false)
                } else if q.is_one() {
                    Repr::Boolean(true)
                } else {
                    return Err(outside());
                }
            }
            SemiringId::Tropical => Repr::Tropical(Ext::Finite(natural(&q).ok_or_else(outside)?)),
            SemiringId::Arctic => Repr::Arctic(Ext::Finite(natural(&q).ok_or_else(outside)?)),
            SemiringId::ExtNaturals => {
                Repr::ExtNaturals(Ext::Finite(natural(&q).ok_or_else(outside)?))
            }
            SemiringId::Bottleneck => Repr::Bottleneck(Ext::Finite(q)),
            SemiringId::ExtNonnegRationals => {
                if q.is_negative() {
                    return Err(outside());
                }
                Repr::ExtRationals(Ext::Finite(q))
            }
            SemiringId::Viterbi => {
                if q.is_negative() || q > BigRational::one() {
                    return Err(outside());
                }
                Repr::Viterbi(q)
            }
        };
        Ok(Weight(repr))
    }

    /// Additive refinement witness.
    ///
    /// Given `x + y = z + w`, returns `[s, t, u, v]` with
    /// `s + t = x`, `s + u = z`, `u + v = y` and `t + v = w`, i.e. a 2x2 matrix
    /// with row sums `(x, y)` and column sums `(z, w)`.
    pub fn refine(
        self,
        x: &Weight,
        y: &Weight,
        z: &Weight,
        w: &Weight,
    ) -> Result<[Weight; 4], SemiringError> {
        for v in [x, y, z, w] {
            v.expect_in(self)?;
        }
        if (x + y) != (z + w) {
            return Err(SemiringError::RefinementPrecondition(Box::new([
                x.clone(),
                y.clone(),
                z.clone(),
                w.clone(),
            ])));
        }
        if self.is_idempotent() {
            Ok(refine_join(self, x, y, z, w))
        } else {
            Ok(refine_cancellative(x, y, z, w))
        }
    }
}

impl fmt::Display for SemiringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringId {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemiringId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| SemiringError::UnknownSemiring(s.to_string()))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// A value extended with `-inf` and `+inf`. The derived order puts
/// `NegInf` below every finite value and `PosInf` above.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Boolean(bool),
    Tropical(Ext<BigUint>),
    Arctic(Ext<BigUint>),
    Bottleneck(Ext<BigRational>),
    ExtNaturals(Ext<BigUint>),
    ExtRationals(Ext<BigRational>),
    Viterbi(BigRational),
}

/// An element of one of the supported semiring carriers.
///
/// The semiring a weight belongs to is part of the value; combining weights
/// from different semirings is a [`SemiringError::CarrierMismatch`]. The
/// operator impls (`&a + &b`, `&a * &b`) panic on a mismatch and are meant
/// for code that has already validated its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Repr);

impl Weight {
    pub fn semiring(&self) -> SemiringId {
        match self.0 {
            Repr::Boolean(_) => SemiringId::Boolean,
            Repr::Tropical(_) => SemiringId::Tropical,
            Repr::Arctic(_) => SemiringId::Arctic,
            Repr::Bottleneck(_) => SemiringId::Bottleneck,
            Repr::ExtNaturals(_) => SemiringId::ExtNaturals,
            Repr::ExtRationals(_) => SemiringId::ExtNonnegRationals,
            Repr::Viterbi(_) => SemiringId::Viterbi,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == self.semiring().zero()
    }

    pub fn is_one(&self) -> bool {
        *self == self.semiring().one()
    }

    fn expect_in(&self, id: SemiringId) -> Result<(), SemiringError> {
        if self.semiring() == id {
            Ok(())
        } else {
            Err(SemiringError::CarrierMismatch {
                left: self.semiring(),
                right: id,
            })
        }
    }

    pub fn checked_add(&self, other: &Weight) -> Result<Weight, SemiringError> {
        use Repr::*;
        let r = match (&self.0, &other.0) {
            (Boolean(a), Boolean(b)) => Boolean(*a || *b),
            (Tropical(a), Tropical(b)) => Tropical(a.min(b).clone()),
            (Arctic(a), Arctic(b)) => Arctic(a.max(b).clone()),
            (Bottleneck(a), Bottleneck(b)) => Bottleneck(a.max(b).clone()),
            (ExtNaturals(a), ExtNaturals(b)) => ExtNaturals(ext_sum(a, b)),
            (ExtRationals(a), ExtRationals(b)) => ExtRationals(ext_sum(a, b)),
            (Viterbi(a), Viterbi(b)) => Viterbi(a.max(b).clone()),
            _ => return Err(self.mismatch(other)),
        };
        Ok(Weight(r))
    }

    pub fn checked_mul(&self, other: &Weight) -> Result<Weight, SemiringError> {
        use Repr::*;
        let r = match (&self.0, &other.0) {
            (Boolean(a), Boolean(b)) => Boolean(*a && *b),
            // Tropical zero is +inf, so +inf absorbs.
            (Tropical(a), Tropical(b)) => Tropical(match (a, b) {
                (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
                _ => Ext::PosInf,
            }),
            // Arctic zero is -inf and annihilates, even against +inf.
            (Arctic(a), Arctic(b)) => Arctic(match (a, b) {
                (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
                (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
                _ => Ext::PosInf,
            }),
            (Bottleneck(a), Bottleneck(b)) => Bottleneck(a.min(b).clone()),
            (ExtNaturals(a), ExtNaturals(b)) => ExtNaturals(ext_product(a, b)),
            (ExtRationals(a), ExtRationals(b)) => ExtRationals(ext_product(a, b)),
            (Viterbi(a), Viterbi(b)) => Viterbi(a * b),
            _ => return Err(self.mismatch(other)),
        };
        Ok(Weight(r))
    }

    /// The Conway star. Total on every carrier.
    pub fn star(&self) -> Weight {
        use Repr::*;
        let sr = self.semiring();
        match &self.0 {
            Boolean(_) | Tropical(_) | Viterbi(_) => sr.one(),
            Bottleneck(_) => Weight(Bottleneck(Ext::PosInf)),
            Arctic(a) => match a {
                Ext::NegInf => sr.one(),
                Ext::Finite(n) if n.is_zero() => sr.one(),
                _ => Weight(Arctic(Ext::PosInf)),
            },
            ExtNaturals(a) => match a {
                Ext::Finite(n) if n.is_zero() => sr.one(),
                _ => Weight(ExtNaturals(Ext::PosInf)),
            },
            ExtRationals(a) => match a {
                Ext::Finite(q) if q < &BigRational::one() => {
                    Weight(ExtRationals(Ext::Finite((BigRational::one() - q).recip())))
                }
                _ => Weight(ExtRationals(Ext::PosInf)),
            },
        }
    }

    fn mismatch(&self, other: &Weight) -> SemiringError {
        SemiringError::CarrierMismatch {
            left: self.semiring(),
            right: other.semiring(),
        }
    }
}

fn ext_sum<T>(a: &Ext<T>, b: &Ext<T>) -> Ext<T>
where
    T: Clone,
    for<'x> &'x T: std::ops::Add<&'x T, Output = T>,
{
    match (a, b) {
        (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
        _ => Ext::PosInf,
    }
}

fn ext_product<T>(a: &Ext<T>, b: &Ext<T>) -> Ext<T>
where
    T: Clone + Zero,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    match (a, b) {
        (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a * b),
        // inf * 0 = 0
        (Ext::Finite(z), _) | (_, Ext::Finite(z)) if z.is_zero() => Ext::Finite(T::zero()),
        _ => Ext::PosInf,
    }
}

/// `a - b` for `b <= a`, with `inf - finite = inf`.
fn ext_diff(a: &Weight, b: &Weight) -> Weight {
    use Repr::*;
    match (&a.0, &b.0) {
        (ExtNaturals(Ext::Finite(a)), ExtNaturals(Ext::Finite(b))) => {
            Weight(ExtNaturals(Ext::Finite(a - b)))
        }
        (ExtRationals(Ext::Finite(a)), ExtRationals(Ext::Finite(b))) => {
            Weight(ExtRationals(Ext::Finite(a - b)))
        }
        (_, ExtNaturals(Ext::PosInf)) | (_, ExtRationals(Ext::PosInf)) => a.semiring().zero(),
        _ => a
            .semiring()
            .infinity()
            .expect("cancellative carriers have +inf"),
    }
}

fn is_infinite(a: &Weight) -> bool {
    matches!(
        a.0,
        Repr::ExtNaturals(Ext::PosInf) | Repr::ExtRationals(Ext::PosInf)
    )
}

/// Refinement in `+`-cancellative carriers (extended naturals/rationals).
/// The finite case is the min/difference construction; infinite sums are
/// split by which of the four inputs are infinite.
fn refine_cancellative(x: &Weight, y: &Weight, z: &Weight, w: &Weight) -> [Weight; 4] {
    let zero = x.semiring().zero();
    let inf = || x.semiring().infinity().unwrap();
    let min = |a: &Weight, b: &Weight| a.min(b).clone();
    match (is_infinite(x), is_infinite(z)) {
        (true, true) => {
            let v = min(y, w);
            [inf(), ext_diff(w, &v), ext_diff(y, &v), v]
        }
        (true, false) => [z.clone(), inf(), zero, y.clone()],
        (false, true) => [x.clone(), zero, inf(), w.clone()],
        (false, false) => {
            let s = min(x, z);
            let t = ext_diff(x, &s);
            let u = ext_diff(z, &s);
            let v = if is_infinite(y) {
                inf()
            } else {
                ext_diff(y, &u)
            };
            [s, t, u, v]
        }
    }
}

/// Refinement when `+` is a join: sort both pairs so the larger summand comes
/// first, use the matrix `[[m, w'], [y', 0]]`, then undo the sorting.
fn refine_join(sr: SemiringId, x: &Weight, y: &Weight, z: &Weight, w: &Weight) -> [Weight; 4] {
    let m = x + y;
    let swap_rows = *x != m;
    let swap_cols = *z != m;
    let (r1, r2) = if swap_rows { (y, x) } else { (x, y) };
    let (_c1, c2) = if swap_cols { (w, z) } else { (z, w) };
    // sorted matrix: rows (r1 = m, r2), columns (c1 = m, c2)
    let mut mat = [[r1.clone(), c2.clone()], [r2.clone(), sr.zero()]];
    if swap_rows {
        mat.swap(0, 1);
    }
    if swap_cols {
        for row in mat.iter_mut() {
            row.swap(0, 1);
        }
    }
    let [[s, t], [u, v]] = mat;
    [s, t, u, v]
}

impl std::ops::Add for &Weight {
    type Output = Weight;

    fn add(self, rhs: &Weight) -> Weight {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl std::ops::Mul for &Weight {
    type Output = Weight;

    fn mul(self, rhs: &Weight) -> Weight {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl<T: fmt::Display> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Finite(v) => v.fmt(f),
            Ext::PosInf => f.write_str("inf"),
        }
    }
}

/// Canonical literal form: reduced fractions, plain integers, `inf`/`-inf`.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Boolean(b) => f.write_str(if *b { "1" } else { "0" }),
            Repr::Tropical(v) | Repr::Arctic(v) | Repr::ExtNaturals(v) => v.fmt(f),
            Repr::Bottleneck(v) | Repr::ExtRationals(v) => match v {
                Ext::NegInf => f.write_str("-inf"),
                Ext::Finite(q) => fmt_rational(q, f),
                Ext::PosInf => f.write_str("inf"),
            },
            Repr::Viterbi(q) => fmt_rational(q, f),
        }
    }
}

use core::cmp::Ordering;
use core::fmt;

/// Exact rational support value, always held in lowest terms with a positive
/// denominator. Ordering follows the real value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: i64,
    denom: i64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            core::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        let g = gcd(numer.unsigned_abs(), denom.unsigned_abs()) as i64;
        let sign = if denom < 0 { -1 } else { 1 };
        Rational {
            numer: sign * numer / g,
            denom: sign * denom / g,
        }
    }

    pub fn integer(value: i64) -> Self {
        Rational {
            numer: value,
            denom: 1,
        }
    }

    pub fn numer(&self) -> i64 {
        self.numer
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn is_integer(&self) -> bool {
        self.denom == 1
    }

    pub fn to_f64(self) -> f64 {
        // Numerators and denominators here stay far below 2^53, so this is
        // one correctly rounded division.
        self.numer as f64 / self.denom as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.denom == other.denom {
            return self.numer.cmp(&other.numer);
        }
        (self.numer as i128 * other.denom as i128).cmp(&(other.numer as i128 * self.denom as i128))
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = Rational::new(4, 8);
        assert_eq!((r.numer(), r.denom()), (1, 2));
        assert_eq!(Rational::new(2, 4), Rational::new(3, 6));
        let neg = Rational::new(3, -6);
        assert_eq!((neg.numer(), neg.denom()), (-1, 2));
    }

    #[test]
    fn order_matches_real_value() {
        let mut v = [
            Rational::new(2, 3),
            Rational::new(1, 2),
            Rational::integer(1),
            Rational::integer(0),
        ];
        v.sort();
        let reals: alloc::vec::Vec<f64> = v.iter().map(|r| r.to_f64()).collect();
        assert!(reals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gcd_cases() {
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(17, 5), 1);
        assert_eq!(Rational::new(0, 5), Rational::integer(0));
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", Rational::new(6, 9)), "2/3");
        assert_eq!(alloc::format!("{}", Rational::integer(5)), "5");
    }
}
